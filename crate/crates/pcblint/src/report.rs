//! Check reports in text and JSON.
//!
//! Both renderings carry the same information: tool version, phase, lab,
//! input digests, netlist statistics, the reconciled findings and summary
//! counts. Neither contains timestamps, so identical inputs give identical
//! bytes.
//!
//! JSON schema, version 1:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "tool": "pcblint", "tool_version": "0.1.0",
//!   "phase": "quick" | "full", "lab": "H3",
//!   "inputs": [{ "path", "kind", "sha256" }],
//!   "netlist": { "nets", "pinrefs" } | null,
//!   "active":   [{ "rule_id", "severity", "locator", "message", "waivable", "waiver": W | null }],
//!   "waived":   [{ ...finding, "waiver": W }],
//!   "proposed": [{ ...finding, "waiver": W }],
//!   "stale":    [{ "rule_id", "locator", "reason", "waiver": W }],
//!   "summary":  { "errors", "warnings", "waived", "proposed", "stale", "ready_for_review" }
//! }
//! W = { "state", "explanation", "reviewer_note": string | null }
//! ```

use std::fmt::Write as _;

use pcblint_core::rules::{Finding, Phase, Severity};
use pcblint_core::waivers::{ReconciledReport, Waiver};
use serde::Serialize;

use crate::inputs::InputFile;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NetlistStats {
    pub nets: usize,
    pub pinrefs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub errors: usize,
    pub warnings: usize,
    pub waived: usize,
    pub proposed: usize,
    pub stale: usize,
    pub ready_for_review: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub phase: Phase,
    pub lab: String,
    pub inputs: Vec<InputFile>,
    pub netlist: Option<NetlistStats>,
    pub findings: ReconciledReport,
}

impl Report {
    pub fn summary(&self) -> Summary {
        let r = &self.findings;
        let count = |s| r.active.iter().filter(|a| a.finding.severity == s).count();
        Summary {
            errors: count(Severity::Error),
            warnings: count(Severity::Warning),
            waived: r.waived.len(),
            proposed: r.proposed.len(),
            stale: r.stale.len(),
            ready_for_review: r.ready_for_review(),
        }
    }

    /// 0 when nothing is active, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.findings.active.is_empty())
    }
}

#[derive(Serialize)]
struct WaiverJson<'a> {
    state: &'a str,
    explanation: &'a str,
    reviewer_note: Option<&'a str>,
}

impl<'a> From<&'a Waiver> for WaiverJson<'a> {
    fn from(w: &'a Waiver) -> Self {
        WaiverJson { state: w.state.as_str(), explanation: &w.explanation, reviewer_note: w.reviewer_note.as_deref() }
    }
}

#[derive(Serialize)]
struct FindingJson<'a> {
    rule_id: &'a str,
    severity: &'a str,
    locator: &'a str,
    message: &'a str,
    waivable: bool,
    waiver: Option<WaiverJson<'a>>,
}

impl<'a> FindingJson<'a> {
    fn new(f: &'a Finding, w: Option<&'a Waiver>) -> Self {
        FindingJson {
            rule_id: &f.rule_id,
            severity: f.severity.as_str(),
            locator: &f.locator,
            message: &f.message,
            waivable: f.waivable,
            waiver: w.map(Into::into),
        }
    }
}

#[derive(Serialize)]
struct StaleJson<'a> {
    rule_id: &'a str,
    locator: &'a str,
    reason: &'a str,
    waiver: WaiverJson<'a>,
}

#[derive(Serialize)]
struct InputJson<'a> {
    path: &'a str,
    kind: &'a str,
    sha256: &'a str,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema_version: u32,
    tool: &'a str,
    tool_version: &'a str,
    phase: &'a str,
    lab: &'a str,
    inputs: Vec<InputJson<'a>>,
    netlist: Option<NetlistStats>,
    active: Vec<FindingJson<'a>>,
    waived: Vec<FindingJson<'a>>,
    proposed: Vec<FindingJson<'a>>,
    stale: Vec<StaleJson<'a>>,
    summary: Summary,
}

pub fn render_json(report: &Report) -> String {
    let r = &report.findings;
    let json = ReportJson {
        schema_version: SCHEMA_VERSION,
        tool: "pcblint",
        tool_version: TOOL_VERSION,
        phase: report.phase.as_str(),
        lab: &report.lab,
        inputs: report
            .inputs
            .iter()
            .map(|i| InputJson { path: &i.path, kind: i.kind.as_str(), sha256: &i.sha256 })
            .collect(),
        netlist: report.netlist,
        active: r.active.iter().map(|a| FindingJson::new(&a.finding, a.rejected.as_ref())).collect(),
        waived: r.waived.iter().map(|e| FindingJson::new(&e.finding, Some(&e.waiver))).collect(),
        proposed: r.proposed.iter().map(|e| FindingJson::new(&e.finding, Some(&e.waiver))).collect(),
        stale: r
            .stale
            .iter()
            .map(|s| StaleJson {
                rule_id: &s.waiver.rule_id,
                locator: &s.waiver.locator,
                reason: s.reason.as_str(),
                waiver: (&s.waiver).into(),
            })
            .collect(),
        summary: report.summary(),
    };
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    text
}

fn indent(text: &str) -> String {
    text.replace('\n', "\n      ")
}

fn finding_line(out: &mut String, f: &Finding) {
    let _ = writeln!(out, "  {:<7} {} {}", f.severity.as_str(), f.rule_id, f.locator);
    let _ = writeln!(out, "      {}", indent(&f.message));
}

fn waiver_lines(out: &mut String, w: &Waiver) {
    let _ = writeln!(out, "      explanation ({}): {}", w.state, indent(&w.explanation));
    if let Some(note) = &w.reviewer_note {
        let _ = writeln!(out, "      reviewer: {}", indent(note));
    }
}

pub fn render_text(report: &Report) -> String {
    let r = &report.findings;
    let mut out = String::new();
    let _ = writeln!(out, "pcblint {TOOL_VERSION}: {} check, lab {}", report.phase, report.lab);
    for i in &report.inputs {
        let _ = writeln!(out, "  {} {} sha256:{}", i.kind, i.path, i.sha256);
    }
    if let Some(n) = report.netlist {
        let _ = writeln!(out, "netlist: {} nets, {} pinrefs", n.nets, n.pinrefs);
    }
    if !r.active.is_empty() {
        let _ = writeln!(out, "\nactive:");
        for a in &r.active {
            finding_line(&mut out, &a.finding);
            if let Some(w) = &a.rejected {
                waiver_lines(&mut out, w);
            }
        }
    }
    for (title, list) in [("waived", &r.waived), ("proposed (awaiting review)", &r.proposed)] {
        if !list.is_empty() {
            let _ = writeln!(out, "\n{title}:");
            for e in list {
                finding_line(&mut out, &e.finding);
                waiver_lines(&mut out, &e.waiver);
            }
        }
    }
    if !r.stale.is_empty() {
        let _ = writeln!(out, "\nstale waivers:");
        for s in &r.stale {
            let _ = writeln!(out, "  {} {}: {}", s.waiver.rule_id, s.waiver.locator, s.reason.as_str());
        }
    }
    let s = report.summary();
    let _ = writeln!(
        out,
        "\n{} errors, {} warnings, {} waived, {} proposed, {} stale; {}",
        s.errors,
        s.warnings,
        s.waived,
        s.proposed,
        s.stale,
        if s.ready_for_review { "ready for human review" } else { "not ready for human review" },
    );
    out
}
