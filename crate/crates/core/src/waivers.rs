//! Student explanations for findings and their review by staff.
//!
//! A waiver is keyed by `(rule_id, locator)`. Reconciling a run's findings
//! against the waiver list sorts every finding and every waiver into exactly
//! one bucket: active, waived (approved), proposed (awaiting review) or
//! stale (the waiver explains nothing that is currently reported, or tries
//! to waive a non-waivable finding).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rules::Finding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WaiverState {
    Proposed,
    Approved,
    Rejected,
}

impl WaiverState {
    pub fn as_str(self) -> &'static str {
        match self {
            WaiverState::Proposed => "proposed",
            WaiverState::Approved => "approved",
            WaiverState::Rejected => "rejected",
        }
    }

    pub fn parse(text: &str) -> Option<WaiverState> {
        match text {
            "proposed" => Some(WaiverState::Proposed),
            "approved" => Some(WaiverState::Approved),
            "rejected" => Some(WaiverState::Rejected),
            _ => None,
        }
    }
}

impl fmt::Display for WaiverState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Waiver {
    pub rule_id: String,
    pub locator: String,
    pub state: WaiverState,
    pub explanation: String,
    pub reviewer_note: Option<String>,
}

impl Waiver {
    pub fn proposed(rule_id: impl Into<String>, locator: impl Into<String>, explanation: impl Into<String>) -> Self {
        Waiver {
            rule_id: rule_id.into(),
            locator: locator.into(),
            state: WaiverState::Proposed,
            explanation: explanation.into(),
            reviewer_note: None,
        }
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.rule_id, &self.locator)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WaiverError {
    #[error("duplicate waiver for {rule_id} at {locator}")]
    DuplicateWaiver { rule_id: String, locator: String },
    #[error("waiver for {rule_id} at {locator} has an empty explanation")]
    EmptyExplanation { rule_id: String, locator: String },
    #[error("no waiver for {rule_id} at {locator}")]
    NoSuchWaiver { rule_id: String, locator: String },
    #[error("waiver for {rule_id} at {locator} was already {state}")]
    AlreadyDecided { rule_id: String, locator: String, state: WaiverState },
}

/// Checks the per-file invariants: unique keys and nonempty explanations.
pub fn validate(waivers: &[Waiver]) -> Result<(), WaiverError> {
    let mut seen = BTreeSet::new();
    for w in waivers {
        if w.explanation.trim().is_empty() {
            return Err(WaiverError::EmptyExplanation { rule_id: w.rule_id.clone(), locator: w.locator.clone() });
        }
        if !seen.insert(w.key()) {
            return Err(WaiverError::DuplicateWaiver { rule_id: w.rule_id.clone(), locator: w.locator.clone() });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Approve,
    Reject,
}

/// Records a staff decision on a proposed waiver.
pub fn review(
    waivers: &[Waiver],
    rule_id: &str,
    locator: &str,
    decision: Decision,
    note: Option<&str>,
) -> Result<Vec<Waiver>, WaiverError> {
    let mut out = waivers.to_vec();
    let w = out
        .iter_mut()
        .find(|w| w.rule_id == rule_id && w.locator == locator)
        .ok_or_else(|| WaiverError::NoSuchWaiver { rule_id: rule_id.into(), locator: locator.into() })?;
    if w.state != WaiverState::Proposed {
        return Err(WaiverError::AlreadyDecided { rule_id: rule_id.into(), locator: locator.into(), state: w.state });
    }
    w.state = match decision {
        Decision::Approve => WaiverState::Approved,
        Decision::Reject => WaiverState::Rejected,
    };
    w.reviewer_note = note.map(Into::into);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveFinding {
    pub finding: Finding,
    /// The rejected waiver, if the student's explanation was turned down.
    pub rejected: Option<Waiver>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplainedFinding {
    pub finding: Finding,
    pub waiver: Waiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StaleReason {
    /// No current finding has this `(rule_id, locator)`.
    NoMatchingFinding,
    /// The matching finding's rule cannot be waived.
    NotWaivable,
}

impl StaleReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StaleReason::NoMatchingFinding => "no matching finding",
            StaleReason::NotWaivable => "finding is not waivable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaleWaiver {
    pub waiver: Waiver,
    pub reason: StaleReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReconciledReport {
    pub active: Vec<ActiveFinding>,
    pub waived: Vec<ExplainedFinding>,
    pub proposed: Vec<ExplainedFinding>,
    pub stale: Vec<StaleWaiver>,
}

impl ReconciledReport {
    /// A design may go to human review once nothing is left unexplained.
    pub fn ready_for_review(&self) -> bool {
        self.active.is_empty()
    }
}

/// Partitions findings and waivers. Output order depends only on the sets
/// given, not on their order.
pub fn reconcile(findings: &[Finding], waivers: &[Waiver]) -> ReconciledReport {
    let by_key: BTreeMap<(&str, &str), &Waiver> = waivers.iter().map(|w| (w.key(), w)).collect();
    let mut findings: Vec<&Finding> = findings.iter().collect();
    findings.sort();
    findings.dedup();

    let mut report = ReconciledReport::default();
    let mut used = BTreeSet::new();
    for f in findings {
        let Some(&w) = by_key.get(&f.key()) else {
            report.active.push(ActiveFinding { finding: f.clone(), rejected: None });
            continue;
        };
        if !f.waivable {
            report.active.push(ActiveFinding { finding: f.clone(), rejected: None });
            report.stale.push(StaleWaiver { waiver: w.clone(), reason: StaleReason::NotWaivable });
            used.insert(w.key());
            continue;
        }
        used.insert(w.key());
        let explained = ExplainedFinding { finding: f.clone(), waiver: w.clone() };
        match w.state {
            WaiverState::Approved => report.waived.push(explained),
            WaiverState::Proposed => report.proposed.push(explained),
            WaiverState::Rejected => report.active.push(ActiveFinding { finding: f.clone(), rejected: Some(w.clone()) }),
        }
    }
    for (key, w) in &by_key {
        if !used.contains(key) {
            report.stale.push(StaleWaiver { waiver: (*w).clone(), reason: StaleReason::NoMatchingFinding });
        }
    }
    report.stale.sort_by(|a, b| a.waiver.key().cmp(&b.waiver.key()));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Severity;
    use alloc::vec;

    fn finding(rule: &str, loc: &str) -> Finding {
        Finding {
            rule_id: rule.into(),
            severity: Severity::Error,
            locator: loc.into(),
            message: "m".into(),
            waivable: true,
        }
    }

    fn waiver(rule: &str, loc: &str, state: WaiverState) -> Waiver {
        Waiver { state, ..Waiver::proposed(rule, loc, "because") }
    }

    #[test]
    fn approved_waiver_waives() {
        let r = reconcile(&[finding("F1", "part:U1")], &[waiver("F1", "part:U1", WaiverState::Approved)]);
        assert_eq!((r.active.len(), r.waived.len()), (0, 1));
        assert!(r.ready_for_review());
    }

    #[test]
    fn rejected_waiver_leaves_finding_active() {
        let r = reconcile(&[finding("F1", "part:U1")], &[waiver("F1", "part:U1", WaiverState::Rejected)]);
        assert_eq!(r.active.len(), 1);
        assert!(r.active[0].rejected.is_some());
        assert!(!r.ready_for_review());
    }

    #[test]
    fn waiver_for_fixed_finding_is_stale() {
        let r = reconcile(&[], &[waiver("F1", "part:U1", WaiverState::Approved)]);
        assert_eq!((r.active.len(), r.stale.len()), (0, 1));
        assert_eq!(r.stale[0].reason, StaleReason::NoMatchingFinding);
    }

    #[test]
    fn non_waivable_findings_stay_active() {
        let mut f = finding("F3", "net:GND");
        f.waivable = false;
        let r = reconcile(&[f], &[waiver("F3", "net:GND", WaiverState::Approved)]);
        assert_eq!(r.active.len(), 1);
        assert_eq!(r.stale[0].reason, StaleReason::NotWaivable);
        assert!(r.waived.is_empty());
    }

    #[test]
    fn review_transitions() {
        let ws = vec![waiver("F1", "part:U1", WaiverState::Proposed)];
        let approved = review(&ws, "F1", "part:U1", Decision::Approve, None).unwrap();
        assert_eq!(approved[0].state, WaiverState::Approved);
        let rejected = review(&ws, "F1", "part:U1", Decision::Reject, Some("fix it")).unwrap();
        assert_eq!(rejected[0].state, WaiverState::Rejected);
        assert_eq!(rejected[0].reviewer_note.as_deref(), Some("fix it"));
        assert!(matches!(
            review(&approved, "F1", "part:U1", Decision::Approve, None),
            Err(WaiverError::AlreadyDecided { .. })
        ));
        assert!(matches!(
            review(&ws, "F2", "part:U1", Decision::Approve, None),
            Err(WaiverError::NoSuchWaiver { .. })
        ));
    }

    #[test]
    fn validate_rejects_duplicates_and_blank_explanations() {
        let w = waiver("F1", "part:U1", WaiverState::Proposed);
        assert!(validate(core::slice::from_ref(&w)).is_ok());
        assert!(matches!(validate(&[w.clone(), w.clone()]), Err(WaiverError::DuplicateWaiver { .. })));
        let blank = Waiver { explanation: " ".into(), ..w };
        assert!(matches!(validate(&[blank]), Err(WaiverError::EmptyExplanation { .. })));
    }
}
