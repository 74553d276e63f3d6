//! Waiver files.
//!
//! One waiver per line, five `|`-separated fields:
//!
//! ```text
//! # rule_id | locator | state | explanation | reviewer_note
//! S4-off-grid | sheet:0/instance:R1.G$1 | proposed | aligned to the connector pitch |
//! F1-status-led | part:U1 | rejected | the LED is on the daughterboard | put it on this board
//! ```
//!
//! `state` is `proposed`, `approved` or `rejected`. Fields are trimmed. A
//! literal `|` is written `\|`, a backslash `\\` and a line break `\n`. The
//! reviewer note may be empty. Blank lines and lines starting with `#` are
//! ignored. Files are UTF-8.

use std::path::Path;

use pcblint_core::waivers::{validate, Waiver, WaiverError, WaiverState};

#[derive(Debug, thiserror::Error)]
pub enum WaiverFileError {
    #[error("waiver file line {line}: {message}")]
    WaiverSyntax { line: usize, message: String },
    #[error("waiver file: {0}")]
    Invalid(#[from] WaiverError),
    #[error("waiver file {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn split_fields(line: &str) -> Result<Vec<String>, String> {
    let mut fields = vec![String::new()];
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some('|') => fields.last_mut().unwrap().push('|'),
                Some('\\') => fields.last_mut().unwrap().push('\\'),
                Some('n') => fields.last_mut().unwrap().push('\n'),
                Some(other) => return Err(format!("unknown escape \\{other}")),
                None => return Err("line ends with a lone backslash".into()),
            },
            '|' => fields.push(String::new()),
            c => fields.last_mut().unwrap().push(c),
        }
    }
    Ok(fields)
}

/// Parses waiver file text. Keys must be unique and explanations nonempty.
pub fn parse_waivers(text: &str) -> Result<Vec<Waiver>, WaiverFileError> {
    let mut waivers = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| WaiverFileError::WaiverSyntax { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_fields(trimmed).map_err(syntax)?;
        let [rule_id, locator, state, explanation, note]: [String; 5] = fields
            .try_into()
            .map_err(|f: Vec<String>| syntax(format!("expected 5 fields, found {}", f.len())))?;
        let (rule_id, locator, note) = (rule_id.trim(), locator.trim(), note.trim());
        if rule_id.is_empty() || locator.is_empty() {
            return Err(syntax("rule id and locator are required".into()));
        }
        let state = WaiverState::parse(state.trim())
            .ok_or_else(|| syntax(format!("unknown state {:?}", state.trim())))?;
        let explanation = explanation.trim();
        if explanation.is_empty() {
            return Err(syntax("explanation is empty".into()));
        }
        waivers.push(Waiver {
            rule_id: rule_id.into(),
            locator: locator.into(),
            state,
            explanation: explanation.into(),
            reviewer_note: (!note.is_empty()).then(|| note.into()),
        });
    }
    validate(&waivers)?;
    Ok(waivers)
}

fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '|' => out.push_str("\\|"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

pub fn render_waivers(waivers: &[Waiver]) -> String {
    let mut out = String::from("# rule_id | locator | state | explanation | reviewer_note\n");
    for w in waivers {
        out.push_str(&format!(
            "{} | {} | {} | {} | {}\n",
            escape(&w.rule_id),
            escape(&w.locator),
            w.state,
            escape(&w.explanation),
            escape(w.reviewer_note.as_deref().unwrap_or("")),
        ));
    }
    out
}

/// Reads a waiver file; a missing file holds no waivers.
pub fn load(path: &Path) -> Result<Vec<Waiver>, WaiverFileError> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_waivers(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(source) => Err(WaiverFileError::Io { path: path.display().to_string(), source }),
    }
}

pub fn save(path: &Path, waivers: &[Waiver]) -> Result<(), WaiverFileError> {
    crate::atomic::write(path, render_waivers(waivers).as_bytes())
        .map_err(|source| WaiverFileError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_file() {
        assert!(parse_waivers("").unwrap().is_empty());
        assert!(parse_waivers("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn one_entry() {
        let w = parse_waivers("S4-off-grid | sheet:0/instance:R1.G$1 | proposed | pitch \\| spacing |\n").unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].explanation, "pitch | spacing");
        assert_eq!(w[0].reviewer_note, None);
        assert_eq!(w[0].state, WaiverState::Proposed);
    }

    #[test]
    fn duplicate_keys() {
        let text = "F1 | part:U1 | proposed | a |\nF1 | part:U1 | approved | b | ok\n";
        assert!(matches!(parse_waivers(text), Err(WaiverFileError::Invalid(WaiverError::DuplicateWaiver { .. }))));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        for (text, line) in [
            ("# c\nF1 | part:U1 | proposed | a\n", 2),
            ("F1 | part:U1 | maybe | a |\n", 1),
            ("\n\nF1 | part:U1 | proposed |  |\n", 3),
            ("F1 | part:U1 | proposed | a \\q |\n", 1),
            (" | part:U1 | proposed | a |\n", 1),
        ] {
            match parse_waivers(text) {
                Err(WaiverFileError::WaiverSyntax { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    fn field() -> impl Strategy<Value = String> {
        "[a-zA-Z0-9:/.$|\\\\\n -]{0,12}".prop_map(|s| s.trim().to_string())
    }

    fn waiver() -> impl Strategy<Value = Waiver> {
        (
            field().prop_filter("nonempty", |s| !s.is_empty()),
            field().prop_filter("nonempty", |s| !s.is_empty()),
            prop_oneof![Just(WaiverState::Proposed), Just(WaiverState::Approved), Just(WaiverState::Rejected)],
            field().prop_filter("nonempty", |s| !s.is_empty()),
            proptest::option::of(field().prop_filter("nonempty", |s| !s.is_empty())),
        )
            .prop_map(|(rule_id, locator, state, explanation, reviewer_note)| Waiver {
                rule_id,
                locator,
                state,
                explanation,
                reviewer_note,
            })
    }

    proptest! {
        #[test]
        fn round_trip(ws in proptest::collection::vec(waiver(), 0..6)) {
            let mut unique = ws.clone();
            unique.sort_by(|a, b| a.key().cmp(&b.key()));
            unique.dedup_by(|a, b| a.key() == b.key());
            let text = render_waivers(&unique);
            prop_assert_eq!(parse_waivers(&text).unwrap(), unique);
        }
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("waivers.txt");
        assert!(load(&path).unwrap().is_empty());
        let ws = vec![Waiver::proposed("S2-missing-value", "part:U1", "no value\nneeded")];
        save(&path, &ws).unwrap();
        assert_eq!(load(&path).unwrap(), ws);
    }
}
