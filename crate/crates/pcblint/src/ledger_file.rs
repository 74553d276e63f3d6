//! Review ledgers as JSON.
//!
//! ```json
//! {
//!   "lab": "H3",
//!   "events": [
//!     { "t": "2026-02-01T17:03:22Z", "kind": "full_check", "outcome": "failed" },
//!     { "t": "2026-02-02T09:12:05Z", "kind": "human_review", "outcome": "passed" }
//!   ]
//! }
//! ```
//!
//! `kind` is `full_check` or `human_review`; `outcome` is `passed` or
//! `failed`; `t` is an ISO-8601 UTC timestamp. Events are kept in the order
//! they were recorded.

use std::path::Path;

use chrono::{SecondsFormat, Utc};
use pcblint_core::scoring::{Event, EventKind, Outcome, ReviewLedger};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("ledger {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("ledger is not valid: {0}")]
    Format(String),
    #[error("ledger belongs to lab {found}, not {expected}")]
    WrongLab { expected: String, found: String },
    #[error("ledger {0} does not exist and no lab was given to start one")]
    NoLab(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRecord {
    t: String,
    kind: String,
    outcome: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerRecord {
    lab: String,
    events: Vec<EventRecord>,
}

pub fn parse_ledger(text: &str) -> Result<ReviewLedger, LedgerError> {
    let record: LedgerRecord = serde_json::from_str(text).map_err(|e| LedgerError::Format(e.to_string()))?;
    let events = record
        .events
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let bad = |what: &str, v: &str| LedgerError::Format(format!("event {i}: unknown {what} {v:?}"));
            Ok(Event {
                kind: EventKind::parse(&e.kind).ok_or_else(|| bad("kind", &e.kind))?,
                outcome: Outcome::parse(&e.outcome).ok_or_else(|| bad("outcome", &e.outcome))?,
                timestamp: e.t,
            })
        })
        .collect::<Result<_, LedgerError>>()?;
    Ok(ReviewLedger::from_events(record.lab, events))
}

pub fn render_ledger(ledger: &ReviewLedger) -> String {
    let record = LedgerRecord {
        lab: ledger.lab().into(),
        events: ledger
            .events()
            .iter()
            .map(|e| EventRecord { t: e.timestamp.clone(), kind: e.kind.as_str().into(), outcome: e.outcome.as_str().into() })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("ledger serializes");
    text.push('\n');
    text
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> LedgerError + '_ {
    move |source| LedgerError::Io { path: path.display().to_string(), source }
}

/// Reads a ledger. A missing file starts an empty ledger for `lab`. If
/// `lab` is given it must match the file's lab.
pub fn load(path: &Path, lab: Option<&str>) -> Result<ReviewLedger, LedgerError> {
    let ledger = match std::fs::read_to_string(path) {
        Ok(text) => parse_ledger(&text)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => match lab {
            Some(lab) => ReviewLedger::new(lab),
            None => return Err(LedgerError::NoLab(path.display().to_string())),
        },
        Err(e) => return Err(io(path)(e)),
    };
    if let Some(expected) = lab {
        if ledger.lab() != expected {
            return Err(LedgerError::WrongLab { expected: expected.into(), found: ledger.lab().into() });
        }
    }
    Ok(ledger)
}

pub fn save(path: &Path, ledger: &ReviewLedger) -> Result<(), LedgerError> {
    crate::atomic::write(path, render_ledger(ledger).as_bytes()).map_err(io(path))
}

/// Appends one event stamped with the current UTC time and saves.
pub fn append(path: &Path, lab: Option<&str>, kind: EventKind, outcome: Outcome) -> Result<ReviewLedger, LedgerError> {
    let mut ledger = load(path, lab)?;
    ledger.record_event(now(), kind, outcome);
    save(path, &ledger)?;
    Ok(ledger)
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcblint_core::scoring::compute_score;

    #[test]
    fn round_trip() {
        let mut l = ReviewLedger::new("H3");
        l.record_event("2026-02-01T17:03:22Z", EventKind::FullCheck, Outcome::Failed);
        l.record_event("2026-02-02T09:12:05Z", EventKind::HumanReview, Outcome::Passed);
        assert_eq!(parse_ledger(&render_ledger(&l)).unwrap(), l);
    }

    #[test]
    fn rejects_unknown_values() {
        let text = r#"{"lab":"H3","events":[{"t":"x","kind":"quick_check","outcome":"passed"}]}"#;
        assert!(matches!(parse_ledger(text), Err(LedgerError::Format(_))));
        assert!(matches!(parse_ledger("{}"), Err(LedgerError::Format(_))));
    }

    #[test]
    fn append_creates_and_checks_lab() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.json");
        assert!(matches!(load(&path, None), Err(LedgerError::NoLab(_))));
        append(&path, Some("H3"), EventKind::FullCheck, Outcome::Passed).unwrap();
        let l = append(&path, None, EventKind::HumanReview, Outcome::Passed).unwrap();
        assert_eq!(l.events().len(), 2);
        assert_eq!(compute_score(&l).to_string(), "11.0 / 10");
        assert!(l.events()[0].timestamp.ends_with('Z'));
        assert!(matches!(load(&path, Some("H4")), Err(LedgerError::WrongLab { .. })));
    }
}
