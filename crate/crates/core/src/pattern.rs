//! Path patterns over the netlist.
//!
//! A pattern describes a walk that starts at a part, leaves it through a
//! pin, follows a net to a pin of another part, and so on:
//!
//! ```text
//! part(name=U1) pin(PB5) net(*) pin(*) part(deviceset=RESISTOR*) pin(*) net(*) pin(A) part(deviceset=LED*) pin(C) net(GND)
//! ```
//!
//! Grammar: whitespace-separated steps `part(k=v[,k=v...])`, `pin(glob)` and
//! `net(glob)`. Part keys are `name`, `deviceset`, `value` (globs) and
//! `attr.NAME` (exact). `part(*)` matches any part and a bare glob such as
//! `part(U*)` is shorthand for `name=U*`. After the first part, steps come in
//! groups of `pin net pin part`; a pattern may end with a trailing
//! `pin net` that requires the last part's pin to sit on a matching net.
//! Consecutive `pin` steps around an inner part are its entry and exit pins.
//!
//! Within one binding every part is distinct, and each exit pin must lead to
//! a different net than the one the part was entered through.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::eagle::{Part, SchematicDoc};
use crate::glob::glob_match;
use crate::netlist::{ElectricalNet, Netlist, PinInstance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("pattern shape: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartStep {
    pub name: Option<String>,
    pub deviceset: Option<String>,
    pub value: Option<String>,
    pub attributes: Vec<(String, String)>,
}

impl PartStep {
    pub fn matches(&self, part: &Part) -> bool {
        self.name.as_deref().is_none_or(|g| glob_match(g, &part.name))
            && self.deviceset.as_deref().is_none_or(|g| glob_match(g, &part.deviceset))
            && self.value.as_deref().is_none_or(|g| glob_match(g, part.value.as_deref().unwrap_or("")))
            && self.attributes.iter().all(|(k, v)| part.attributes.get(k) == Some(v))
    }
}

impl fmt::Display for PartStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut args: Vec<String> = Vec::new();
        if let Some(g) = &self.name {
            args.push(format!("name={g}"));
        }
        if let Some(g) = &self.deviceset {
            args.push(format!("deviceset={g}"));
        }
        if let Some(g) = &self.value {
            args.push(format!("value={g}"));
        }
        for (k, v) in &self.attributes {
            args.push(format!("attr.{k}={v}"));
        }
        if args.is_empty() {
            f.write_str("part(*)")
        } else {
            write!(f, "part({})", args.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Part(PartStep),
    Pin(String),
    Net(String),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Part(p) => p.fmt(f),
            Step::Pin(g) => write!(f, "pin({g})"),
            Step::Net(g) => write!(f, "net({g})"),
        }
    }
}

/// A validated pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPattern {
    steps: Vec<Step>,
}

impl PathPattern {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn part_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Part(_))).count()
    }

    pub fn net_hops(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Net(_))).count()
    }

    fn part(&self, i: usize) -> &PartStep {
        match &self.steps[i] {
            Step::Part(p) => p,
            _ => unreachable!("shape validated"),
        }
    }

    fn glob(&self, i: usize) -> &str {
        match &self.steps[i] {
            Step::Pin(g) | Step::Net(g) => g,
            Step::Part(_) => unreachable!("shape validated"),
        }
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            s.fmt(f)?;
        }
        Ok(())
    }
}

impl core::str::FromStr for PathPattern {
    type Err = PatternError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        compile_pattern(s)
    }
}

fn syntax(position: usize, message: impl Into<String>) -> PatternError {
    PatternError::Syntax { position, message: message.into() }
}

fn part_step(args: &str, at: usize) -> Result<PartStep, PatternError> {
    let mut step = PartStep::default();
    for arg in args.split(',') {
        let arg = arg.trim();
        if arg.is_empty() {
            return Err(syntax(at, "empty part argument"));
        }
        let Some((key, value)) = arg.split_once('=') else {
            if arg != "*" {
                step.name = Some(arg.into());
            }
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(syntax(at, format!("empty value for key {key:?}")));
        }
        match key {
            "name" => step.name = Some(value.into()),
            "deviceset" => step.deviceset = Some(value.into()),
            "value" => step.value = Some(value.into()),
            _ => match key.strip_prefix("attr.") {
                Some(attr) if !attr.is_empty() => step.attributes.push((attr.into(), value.into())),
                _ => return Err(syntax(at, format!("unknown part key {key:?}"))),
            },
        }
    }
    Ok(step)
}

/// Parses and validates pattern text.
pub fn compile_pattern(text: &str) -> Result<PathPattern, PatternError> {
    let mut steps = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i == bytes.len() {
            break;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
            i += 1;
        }
        let word = &text[start..i];
        if word.is_empty() {
            return Err(syntax(i, "expected part, pin or net"));
        }
        if bytes.get(i) != Some(&b'(') {
            return Err(syntax(i, format!("expected '(' after {word:?}")));
        }
        let open = i;
        let close = text[open..]
            .find(')')
            .map(|off| open + off)
            .ok_or_else(|| syntax(open, "unclosed '('"))?;
        let args = &text[open + 1..close];
        i = close + 1;
        if i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            return Err(syntax(i, "expected whitespace between steps"));
        }
        let single = |args: &str| {
            let g = args.trim();
            if g.is_empty() || g.contains(',') {
                Err(syntax(open + 1, format!("{word}() takes exactly one glob")))
            } else {
                Ok(String::from(g))
            }
        };
        steps.push(match word {
            "part" => Step::Part(part_step(args, open + 1)?),
            "pin" => Step::Pin(single(args)?),
            "net" => Step::Net(single(args)?),
            _ => return Err(syntax(start, format!("unknown step {word:?}"))),
        });
    }
    check_shape(&steps)?;
    Ok(PathPattern { steps })
}

fn check_shape(steps: &[Step]) -> Result<(), PatternError> {
    let shape = |msg: &str| Err(PatternError::Shape(msg.into()));
    if !matches!(steps.first(), Some(Step::Part(_))) {
        return shape("a pattern must start with part(...)");
    }
    // After the first part: (pin net pin part)* then optionally (pin net).
    let rest = &steps[1..];
    let mut chunks = rest.chunks(4);
    for chunk in chunks.by_ref() {
        match chunk {
            [Step::Pin(_), Step::Net(_), Step::Pin(_), Step::Part(_)] => {}
            [Step::Pin(_), Step::Net(_)] => {}
            [Step::Pin(_)] | [Step::Pin(_), Step::Net(_), Step::Pin(_)] => {
                return shape("a pattern must end with part(...) or with pin(...) net(...)")
            }
            _ => return shape("steps must alternate part, pin, net, pin, part"),
        }
    }
    if !steps.iter().any(|s| matches!(s, Step::Net(_))) {
        return shape("a pattern needs at least one net(...) step");
    }
    Ok(())
}

/// One concrete object bound to a pattern step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    Part(String),
    Pin(PinInstance),
    /// Canonical name of the electrical net.
    Net(String),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Part(p) => f.write_str(p),
            Bound::Pin(p) => write!(f, "{}.{}", p.part, p.pin),
            Bound::Net(n) => f.write_str(n),
        }
    }
}

/// A match: one bound object per pattern step, in step order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternBinding {
    pub steps: Vec<Bound>,
}

impl PatternBinding {
    pub fn parts(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().filter_map(|b| match b {
            Bound::Part(p) => Some(p.as_str()),
            _ => None,
        })
    }

    pub fn pins(&self) -> impl Iterator<Item = &PinInstance> {
        self.steps.iter().filter_map(|b| match b {
            Bound::Pin(p) => Some(p),
            _ => None,
        })
    }

    pub fn nets(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().filter_map(|b| match b {
            Bound::Net(n) => Some(n.as_str()),
            _ => None,
        })
    }
}

/// Part names first, then pins, then nets.
impl Ord for PatternBinding {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts()
            .cmp(other.parts())
            .then_with(|| self.pins().cmp(other.pins()))
            .then_with(|| self.nets().cmp(other.nets()))
    }
}

impl PartialOrd for PatternBinding {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PatternBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" - ")?;
            }
            b.fmt(f)?;
        }
        Ok(())
    }
}

fn net_matches(net: &ElectricalNet, glob: &str) -> bool {
    net.aliases().iter().any(|a| glob_match(glob, a))
}

struct Matcher<'a> {
    sch: &'a SchematicDoc,
    nl: &'a Netlist,
    pat: &'a PathPattern,
    /// Connected pins per part: (pin, canonical net).
    pins: BTreeMap<&'a str, Vec<(&'a PinInstance, &'a str)>>,
    out: Vec<PatternBinding>,
}

impl<'a> Matcher<'a> {
    fn part_ok(&self, name: &str, step: usize) -> bool {
        self.sch.part(name).is_some_and(|p| self.pat.part(step).matches(p))
    }

    /// Extends a partial binding whose last bound step is the part at index
    /// `at`, entered through net `entered` (None for the first part).
    fn extend(&mut self, at: usize, entered: Option<&'a str>, stack: &mut Vec<Bound>) {
        if at + 1 == self.pat.steps.len() {
            self.out.push(PatternBinding { steps: stack.clone() });
            return;
        }
        let Bound::Part(current) = &stack[at] else { unreachable!() };
        let current = current.clone();
        let exit_glob = self.pat.glob(at + 1);
        let net_glob = self.pat.glob(at + 2);
        let candidates = self.pins.get(current.as_str()).cloned().unwrap_or_default();
        for (exit_pin, net_name) in candidates {
            if !glob_match(exit_glob, &exit_pin.pin) || Some(net_name) == entered {
                continue;
            }
            let net = self.nl.net(net_name).expect("pin index names a net");
            if !net_matches(net, net_glob) {
                continue;
            }
            stack.push(Bound::Pin(exit_pin.clone()));
            stack.push(Bound::Net(net_name.into()));
            if at + 3 == self.pat.steps.len() {
                self.out.push(PatternBinding { steps: stack.clone() });
            } else {
                let entry_glob = self.pat.glob(at + 3);
                for entry in net.members() {
                    let used = stack.iter().any(|b| matches!(b, Bound::Part(p) if *p == entry.part));
                    if used || !glob_match(entry_glob, &entry.pin) || !self.part_ok(&entry.part, at + 4) {
                        continue;
                    }
                    stack.push(Bound::Pin(entry.clone()));
                    stack.push(Bound::Part(entry.part.clone()));
                    self.extend(at + 4, Some(net_name), stack);
                    stack.truncate(stack.len() - 2);
                }
            }
            stack.truncate(stack.len() - 2);
        }
    }
}

/// All bindings of `pat` in the design, deduplicated and sorted.
pub fn match_pattern(nl: &Netlist, sch: &SchematicDoc, pat: &PathPattern) -> Vec<PatternBinding> {
    let mut pins: BTreeMap<&str, Vec<(&PinInstance, &str)>> = BTreeMap::new();
    for (pin, net) in nl.pin_index() {
        pins.entry(pin.part.as_str()).or_default().push((pin, net.as_str()));
    }
    let mut m = Matcher { sch, nl, pat, pins, out: Vec::new() };
    let first = pat.part(0);
    for part in sch.parts().iter().filter(|p| first.matches(p)) {
        let mut stack = alloc::vec![Bound::Part(part.name.clone())];
        m.extend(0, None, &mut stack);
    }
    let mut out = m.out;
    out.sort();
    out.dedup();
    out
}
