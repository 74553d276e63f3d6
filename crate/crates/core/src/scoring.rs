//! Pay-for-review lab scoring.
//!
//! Every lab starts with 12 points and is worth 10. Each full check and each
//! human review costs half a point, pass or fail. Quick checks are free and
//! never reach the ledger. A lab is complete once a full check and a human
//! review have both passed; only then does it have a score.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Mul, Sub};

/// Grade points in exact tenths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Points(i64);

impl Points {
    pub const ZERO: Points = Points(0);

    pub const fn from_tenths(tenths: i64) -> Self {
        Points(tenths)
    }

    pub const fn tenths(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl Sub for Points {
    type Output = Points;
    fn sub(self, rhs: Points) -> Points {
        Points(self.0 - rhs.0)
    }
}

impl Mul<i64> for Points {
    type Output = Points;
    fn mul(self, rhs: i64) -> Points {
        Points(self.0 * rhs)
    }
}

impl fmt::Display for Points {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        write!(f, "{sign}{}.{}", self.0.abs() / 10, self.0.abs() % 10)
    }
}

pub const BASE_WORTH: Points = Points(100);
pub const STARTING_BALANCE: Points = Points(120);
pub const COST_PER_REVIEW: Points = Points(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    FullCheck,
    HumanReview,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::FullCheck => "full_check",
            EventKind::HumanReview => "human_review",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "full_check" => Some(EventKind::FullCheck),
            "human_review" => Some(EventKind::HumanReview),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Passed => "passed",
            Outcome::Failed => "failed",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "passed" => Some(Outcome::Passed),
            "failed" => Some(Outcome::Failed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// ISO-8601 UTC, supplied by the caller.
    pub timestamp: String,
    pub kind: EventKind,
    pub outcome: Outcome,
}

/// Append-only record of the paid checks and reviews for one lab.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewLedger {
    lab: String,
    events: Vec<Event>,
}

impl ReviewLedger {
    pub fn new(lab: impl Into<String>) -> Self {
        ReviewLedger { lab: lab.into(), events: Vec::new() }
    }

    pub fn from_events(lab: impl Into<String>, events: Vec<Event>) -> Self {
        ReviewLedger { lab: lab.into(), events }
    }

    pub fn lab(&self) -> &str {
        &self.lab
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn record_event(&mut self, timestamp: impl Into<String>, kind: EventKind, outcome: Outcome) {
        self.events.push(Event { timestamp: timestamp.into(), kind, outcome });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabScore {
    pub complete: bool,
    pub score: Option<Points>,
}

impl fmt::Display for LabScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.score {
            Some(s) => write!(f, "{s} / {}", BASE_WORTH.0 / 10),
            None => f.write_str("incomplete"),
        }
    }
}

pub fn compute_score(ledger: &ReviewLedger) -> LabScore {
    let passed = |k| ledger.events.iter().any(|e| e.kind == k && e.outcome == Outcome::Passed);
    let complete = passed(EventKind::FullCheck) && passed(EventKind::HumanReview);
    let score = complete.then(|| {
        let spent = COST_PER_REVIEW * ledger.events.len() as i64;
        (STARTING_BALANCE - spent).max(Points::ZERO)
    });
    LabScore { complete, score }
}
