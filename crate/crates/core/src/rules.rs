//! Rule registry, lab rule sets and the evaluation engine.
//!
//! Rules come in two phases. Quick rules are style checks and may only emit
//! warnings. Full rules look for design errors; a Full run also includes
//! every Quick rule, so its report stands on its own. Findings are sorted by
//! `(rule_id, locator)`. A rule that fails internally, emits an error from
//! the Quick phase, or reports the same locator twice produces a finding
//! under the reserved id [`INTERNAL_RULE_ID`] instead of being dropped.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::checks::{self, CheckParams};
use crate::eagle::{BoardDoc, DocumentKind, LibraryDoc, SchematicDoc};
use crate::netlist::Netlist;

/// Rule id of findings raised by the engine itself.
pub const INTERNAL_RULE_ID: &str = "X0-internal";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Quick,
    Full,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Quick => "quick",
            Phase::Full => "full",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which documents a rule inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppliesTo {
    Schematic,
    Board,
    Library,
    /// Runs on a standalone library, a schematic's embedded libraries, or both.
    LibraryOrSchematic,
    SchematicBoardPair,
}

impl AppliesTo {
    pub fn satisfied_by(self, inputs: &BTreeSet<DocumentKind>) -> bool {
        let has = |k| inputs.contains(&k);
        match self {
            AppliesTo::Schematic => has(DocumentKind::Schematic),
            AppliesTo::Board => has(DocumentKind::Board),
            AppliesTo::Library => has(DocumentKind::Library),
            AppliesTo::LibraryOrSchematic => has(DocumentKind::Library) || has(DocumentKind::Schematic),
            AppliesTo::SchematicBoardPair => has(DocumentKind::Schematic) && has(DocumentKind::Board),
        }
    }
}

impl fmt::Display for AppliesTo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AppliesTo::Schematic => "schematic",
            AppliesTo::Board => "board",
            AppliesTo::Library => "library",
            AppliesTo::LibraryOrSchematic => "library or schematic",
            AppliesTo::SchematicBoardPair => "schematic and board",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Finding {
    pub rule_id: String,
    pub severity: Severity,
    pub locator: String,
    pub message: String,
    pub waivable: bool,
}

impl Finding {
    pub fn key(&self) -> (&str, &str) {
        (&self.rule_id, &self.locator)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct RuleError(pub String);

/// The documents under check. The netlist must be the one built from the
/// schematic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Design<'a> {
    pub schematic: Option<(&'a SchematicDoc, &'a Netlist)>,
    pub board: Option<&'a BoardDoc>,
    pub library: Option<&'a LibraryDoc>,
}

impl<'a> Design<'a> {
    pub fn new() -> Self {
        Design::default()
    }

    pub fn with_schematic(mut self, sch: &'a SchematicDoc, nl: &'a Netlist) -> Self {
        self.schematic = Some((sch, nl));
        self
    }

    pub fn with_board(mut self, brd: &'a BoardDoc) -> Self {
        self.board = Some(brd);
        self
    }

    pub fn with_library(mut self, lib: &'a LibraryDoc) -> Self {
        self.library = Some(lib);
        self
    }

    pub fn kinds(&self) -> BTreeSet<DocumentKind> {
        let mut kinds = BTreeSet::new();
        if self.schematic.is_some() {
            kinds.insert(DocumentKind::Schematic);
        }
        if self.board.is_some() {
            kinds.insert(DocumentKind::Board);
        }
        if self.library.is_some() {
            kinds.insert(DocumentKind::Library);
        }
        kinds
    }
}

/// What a check function sees.
pub struct RuleContext<'a> {
    pub design: Design<'a>,
    pub params: &'a CheckParams,
}

impl<'a> RuleContext<'a> {
    pub fn schematic(&self) -> Result<(&'a SchematicDoc, &'a Netlist), RuleError> {
        self.design.schematic.ok_or_else(|| RuleError("no schematic supplied".into()))
    }

    pub fn board(&self) -> Result<&'a BoardDoc, RuleError> {
        self.design.board.ok_or_else(|| RuleError("no board supplied".into()))
    }
}

/// Collects the findings of one rule.
pub struct Emitter {
    rule_id: &'static str,
    waivable: bool,
    phase: Phase,
    findings: Vec<Finding>,
    violations: Vec<String>,
}

impl Emitter {
    fn new(rule: &Rule) -> Self {
        Emitter { rule_id: rule.id, waivable: rule.waivable, phase: rule.phase, findings: Vec::new(), violations: Vec::new() }
    }

    pub fn emit(&mut self, severity: Severity, locator: impl Into<String>, message: impl Into<String>) {
        if self.phase == Phase::Quick && severity == Severity::Error {
            self.violations.push("quick-phase rule emitted an error".into());
            return;
        }
        let locator = locator.into();
        if self.findings.iter().any(|f| f.locator == locator) {
            self.violations.push(format!("locator {locator} reported twice"));
            return;
        }
        self.findings.push(Finding {
            rule_id: self.rule_id.into(),
            severity,
            locator,
            message: message.into(),
            waivable: self.waivable,
        });
    }

    pub fn warn(&mut self, locator: impl Into<String>, message: impl Into<String>) {
        self.emit(Severity::Warning, locator, message);
    }

    pub fn error(&mut self, locator: impl Into<String>, message: impl Into<String>) {
        self.emit(Severity::Error, locator, message);
    }
}

pub type CheckFn = fn(&RuleContext<'_>, &mut Emitter) -> Result<(), RuleError>;

#[derive(Clone)]
pub struct Rule {
    pub id: &'static str,
    pub title: &'static str,
    /// Highest severity the rule emits.
    pub severity: Severity,
    pub phase: Phase,
    pub applies_to: AppliesTo,
    pub waivable: bool,
    pub check: CheckFn,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("id", &self.id)
            .field("severity", &self.severity)
            .field("phase", &self.phase)
            .field("applies_to", &self.applies_to)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct Registry {
    rules: Vec<Rule>,
}

impl Registry {
    /// Builds a registry; ids must be unique and must not use the reserved
    /// `X` prefix.
    pub fn new(rules: Vec<Rule>) -> Result<Registry, ConfigError> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if r.id.starts_with('X') {
                return Err(ConfigError::ReservedRuleId(r.id.into()));
            }
            if !seen.insert(r.id) {
                return Err(ConfigError::DuplicateRule { lab: String::new(), id: r.id.into() });
            }
            if r.phase == Phase::Quick && r.severity == Severity::Error {
                return Err(ConfigError::QuickRuleSeverity(r.id.into()));
            }
        }
        Ok(Registry { rules })
    }

    /// The built-in rule catalog.
    pub fn catalog() -> Registry {
        Registry::new(checks::catalog()).expect("built-in catalog is well formed")
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

/// A parameter value as read from a configuration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Text(String),
    /// A decimal literal, kept as text so lengths stay exact.
    Number(String),
    List(Vec<ParamValue>),
    Table(Vec<(String, ParamValue)>),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Text(s) => write!(f, "{s:?}"),
            ParamValue::Number(n) => f.write_str(n),
            ParamValue::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    v.fmt(f)?;
                }
                f.write_str("]")
            }
            ParamValue::Table(entries) => {
                f.write_str("{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k} = {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

pub type ParamOverrides = Vec<(String, ParamValue)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleEntry {
    pub id: String,
    pub params: ParamOverrides,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabConfig {
    /// Document kinds a submission for this lab consists of.
    pub inputs: BTreeSet<DocumentKind>,
    pub params: ParamOverrides,
    pub rules: Vec<RuleEntry>,
}

/// Lab rule sets as written in a configuration file, before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSetConfig {
    pub params: ParamOverrides,
    pub labs: BTreeMap<String, LabConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("lab {lab}: unknown rule {id:?}")]
    UnknownRule { lab: String, id: String },
    #[error("lab {lab}: rule {id} is listed twice")]
    DuplicateRule { lab: String, id: String },
    #[error("lab {lab}: rule {id} needs a {needs} but the lab's inputs are {inputs}")]
    InapplicableRule { lab: String, id: String, needs: AppliesTo, inputs: String },
    #[error("lab {0}: no inputs declared")]
    NoInputs(String),
    #[error("rule id {0:?} uses the reserved X prefix")]
    ReservedRuleId(String),
    #[error("rule {0}: quick-phase rules may only emit warnings")]
    QuickRuleSeverity(String),
    #[error("unknown parameter {0:?}")]
    UnknownParam(String),
    #[error("parameter {key}: {message}")]
    BadParam { key: String, message: String },
}

#[derive(Debug, Clone)]
struct ResolvedLab {
    inputs: BTreeSet<DocumentKind>,
    /// Indices into the registry, with their resolved parameters.
    rules: Vec<(usize, CheckParams)>,
}

/// A validated configuration bound to a registry.
#[derive(Debug, Clone)]
pub struct RuleSet {
    registry: Registry,
    labs: BTreeMap<String, ResolvedLab>,
}

impl RuleSet {
    /// Resolves rule ids and parameters, rejecting anything a run could trip
    /// over later.
    pub fn new(registry: Registry, config: &RuleSetConfig) -> Result<RuleSet, ConfigError> {
        let mut base = CheckParams::default();
        base.apply_all(&config.params)?;
        let mut labs = BTreeMap::new();
        for (lab, lc) in &config.labs {
            if lc.inputs.is_empty() {
                return Err(ConfigError::NoInputs(lab.clone()));
            }
            let mut lab_params = base.clone();
            lab_params.apply_all(&lc.params)?;
            let mut rules = Vec::new();
            let mut seen = BTreeSet::new();
            for entry in &lc.rules {
                let index = registry
                    .rules
                    .iter()
                    .position(|r| r.id == entry.id)
                    .ok_or_else(|| ConfigError::UnknownRule { lab: lab.clone(), id: entry.id.clone() })?;
                if !seen.insert(entry.id.as_str()) {
                    return Err(ConfigError::DuplicateRule { lab: lab.clone(), id: entry.id.clone() });
                }
                let rule = &registry.rules[index];
                if !rule.applies_to.satisfied_by(&lc.inputs) {
                    let inputs: Vec<&str> = lc.inputs.iter().map(|k| k.as_str()).collect();
                    return Err(ConfigError::InapplicableRule {
                        lab: lab.clone(),
                        id: entry.id.clone(),
                        needs: rule.applies_to,
                        inputs: inputs.join("+"),
                    });
                }
                let mut params = lab_params.clone();
                params.apply_all(&entry.params)?;
                params.validate()?;
                rules.push((index, params));
            }
            labs.insert(lab.clone(), ResolvedLab { inputs: lc.inputs.clone(), rules });
        }
        Ok(RuleSet { registry, labs })
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn labs(&self) -> impl Iterator<Item = &str> {
        self.labs.keys().map(String::as_str)
    }

    pub fn lab_inputs(&self, lab: &str) -> Option<&BTreeSet<DocumentKind>> {
        self.labs.get(lab).map(|l| &l.inputs)
    }

    /// Enabled rule ids of a lab, in configuration order.
    pub fn lab_rules(&self, lab: &str) -> Option<Vec<&'static str>> {
        self.labs.get(lab).map(|l| l.rules.iter().map(|(i, _)| self.registry.rules[*i].id).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("unknown lab {0:?}")]
    UnknownLab(String),
    #[error("lab {lab} expects a {kind} file")]
    MissingInput { lab: String, kind: DocumentKind },
}

/// The rules selected for one run, ready to be evaluated in any order.
pub struct RunPlan<'a> {
    design: Design<'a>,
    rules: Vec<(&'a Rule, &'a CheckParams)>,
}

impl<'a> RunPlan<'a> {
    pub fn new(ruleset: &'a RuleSet, design: Design<'a>, lab: &str, phase: Phase) -> Result<Self, RunError> {
        let resolved = ruleset.labs.get(lab).ok_or_else(|| RunError::UnknownLab(lab.into()))?;
        let present = design.kinds();
        if let Some(&kind) = resolved.inputs.iter().find(|k| !present.contains(k)) {
            return Err(RunError::MissingInput { lab: lab.into(), kind });
        }
        let rules = resolved
            .rules
            .iter()
            .map(|(i, p)| (&ruleset.registry.rules[*i], p))
            .filter(|(r, _)| phase == Phase::Full || r.phase == Phase::Quick)
            .collect();
        Ok(RunPlan { design, rules })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule_ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.rules.iter().map(|(r, _)| r.id)
    }

    /// Evaluates the `index`-th rule. Internal failures become findings.
    pub fn evaluate(&self, index: usize) -> Vec<Finding> {
        let (rule, params) = self.rules[index];
        let ctx = RuleContext { design: self.design, params };
        let mut emitter = Emitter::new(rule);
        let result = (rule.check)(&ctx, &mut emitter);
        let mut problems = emitter.violations;
        if let Err(e) = result {
            problems.insert(0, e.0);
        }
        let mut findings = emitter.findings;
        if !problems.is_empty() {
            findings.push(Finding {
                rule_id: INTERNAL_RULE_ID.into(),
                severity: Severity::Error,
                locator: format!("rule:{}", rule.id),
                message: format!("rule {} failed: {}", rule.id, problems.join("; ")),
                waivable: false,
            });
        }
        findings
    }

    /// Evaluates every rule in order.
    pub fn run(&self) -> Vec<Finding> {
        merge((0..self.len()).map(|i| self.evaluate(i)))
    }
}

/// Combines per-rule results into the canonical order.
pub fn merge(parts: impl IntoIterator<Item = Vec<Finding>>) -> Vec<Finding> {
    let mut all: Vec<Finding> = parts.into_iter().flatten().collect();
    all.sort_by(|a, b| a.key().cmp(&b.key()));
    all
}

/// Runs the lab's rules for `phase` against `design`.
pub fn run_rules(ruleset: &RuleSet, design: Design<'_>, lab: &str, phase: Phase) -> Result<Vec<Finding>, RunError> {
    Ok(RunPlan::new(ruleset, design, lab, phase)?.run())
}
