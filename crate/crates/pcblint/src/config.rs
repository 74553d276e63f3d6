//! Rule-set configuration files.
//!
//! ```toml
//! [params]                      # every lab
//! placement_grid = 2.54
//!
//! [labs.H3]
//! inputs = ["schematic"]        # schematic, board, library
//! rules = ["S2-missing-value", "F1-status-led"]
//!
//! [labs.H3.params]              # this lab only
//! mcu_part = "IC1"
//!
//! [labs.H3.rule_params."F1-status-led"]   # one rule in this lab
//! led_pin = "PB0"
//! ```

use std::collections::BTreeSet;

use pcblint_core::rules::{ConfigError, LabConfig, ParamOverrides, ParamValue, Registry, RuleEntry, RuleSet, RuleSetConfig};
use pcblint_core::DocumentKind;
use toml::{Table, Value};

pub const DEFAULT_CONFIG: &str = include_str!("../default-config.toml");

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("configuration is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("configuration: {0}")]
    Structure(String),
    #[error(transparent)]
    Rules(#[from] ConfigError),
}

fn structure<T>(message: impl Into<String>) -> Result<T, ConfigFileError> {
    Err(ConfigFileError::Structure(message.into()))
}

fn param_value(key: &str, v: &Value) -> Result<ParamValue, ConfigFileError> {
    Ok(match v {
        Value::String(s) => ParamValue::Text(s.clone()),
        Value::Integer(i) => ParamValue::Number(i.to_string()),
        Value::Float(f) => ParamValue::Number(f.to_string()),
        Value::Array(items) => ParamValue::List(items.iter().map(|i| param_value(key, i)).collect::<Result<_, _>>()?),
        Value::Table(t) => ParamValue::Table(
            t.iter().map(|(k, v)| Ok((k.clone(), param_value(key, v)?))).collect::<Result<_, ConfigFileError>>()?,
        ),
        other => return structure(format!("parameter {key}: unsupported value {other}")),
    })
}

fn params(table: Option<&Value>, context: &str) -> Result<ParamOverrides, ConfigFileError> {
    match table {
        None => Ok(Vec::new()),
        Some(Value::Table(t)) => t.iter().map(|(k, v)| Ok((k.clone(), param_value(k, v)?))).collect(),
        Some(_) => structure(format!("{context} must be a table")),
    }
}

fn strings<'a>(v: Option<&'a Value>, context: &str) -> Result<Vec<&'a str>, ConfigFileError> {
    let Some(Value::Array(items)) = v else {
        return structure(format!("{context} must be a list of strings"));
    };
    items
        .iter()
        .map(|i| i.as_str().map_or_else(|| structure(format!("{context} must be a list of strings")), Ok))
        .collect()
}

fn document_kind(name: &str) -> Option<DocumentKind> {
    [DocumentKind::Schematic, DocumentKind::Board, DocumentKind::Library]
        .into_iter()
        .find(|k| k.as_str() == name)
}

fn lab(name: &str, v: &Value) -> Result<LabConfig, ConfigFileError> {
    let Value::Table(t) = v else { return structure(format!("labs.{name} must be a table")) };
    for key in t.keys() {
        if !["inputs", "rules", "params", "rule_params"].contains(&key.as_str()) {
            return structure(format!("labs.{name}: unknown key {key:?}"));
        }
    }
    let mut inputs = BTreeSet::new();
    for kind in strings(t.get("inputs"), &format!("labs.{name}.inputs"))? {
        let Some(k) = document_kind(kind) else {
            return structure(format!("labs.{name}.inputs: unknown document kind {kind:?}"));
        };
        inputs.insert(k);
    }
    let rule_params = match t.get("rule_params") {
        None => Table::new(),
        Some(Value::Table(rp)) => rp.clone(),
        Some(_) => return structure(format!("labs.{name}.rule_params must be a table")),
    };
    let ids = strings(t.get("rules"), &format!("labs.{name}.rules"))?;
    if let Some(orphan) = rule_params.keys().find(|k| !ids.contains(&k.as_str())) {
        return structure(format!("labs.{name}.rule_params: rule {orphan} is not enabled in this lab"));
    }
    let rules = ids
        .iter()
        .map(|id| {
            let p = params(rule_params.get(*id), &format!("labs.{name}.rule_params.{id}"))?;
            Ok(RuleEntry { id: (*id).into(), params: p })
        })
        .collect::<Result<_, ConfigFileError>>()?;
    Ok(LabConfig { inputs, params: params(t.get("params"), &format!("labs.{name}.params"))?, rules })
}

/// Parses configuration text without validating it against a registry.
pub fn parse_config(text: &str) -> Result<RuleSetConfig, ConfigFileError> {
    let root: Table = text.parse()?;
    let mut config = RuleSetConfig::default();
    for (key, value) in &root {
        match key.as_str() {
            "params" => config.params = params(Some(value), "params")?,
            "labs" => {
                let Value::Table(labs) = value else { return structure("labs must be a table") };
                for (name, v) in labs {
                    config.labs.insert(name.clone(), lab(name, v)?);
                }
            }
            other => return structure(format!("unknown top-level key {other:?}")),
        }
    }
    Ok(config)
}

/// Parses and validates configuration against the built-in catalog.
pub fn load_ruleset(text: &str) -> Result<RuleSet, ConfigFileError> {
    Ok(RuleSet::new(Registry::catalog(), &parse_config(text)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let rs = load_ruleset(DEFAULT_CONFIG).unwrap();
        assert_eq!(rs.labs().collect::<Vec<_>>(), ["H2", "H3", "H4"]);
        assert_eq!(rs.lab_rules("H3").unwrap().len(), 8);
        assert_eq!(rs.lab_rules("H4").unwrap().len(), 12);
    }

    #[test]
    fn inapplicable_rule_rejected_at_load() {
        let text = r#"
            [labs.L]
            inputs = ["schematic"]
            rules = ["F7-elements-inside-outline"]
        "#;
        assert!(matches!(load_ruleset(text), Err(ConfigFileError::Rules(ConfigError::InapplicableRule { .. }))));
    }

    #[test]
    fn unknown_rule_and_param_rejected() {
        let unknown = "[labs.L]\ninputs = [\"schematic\"]\nrules = [\"F99\"]\n";
        assert!(matches!(load_ruleset(unknown), Err(ConfigFileError::Rules(ConfigError::UnknownRule { .. }))));
        let param = "[params]\nfrobnicate = 1\n";
        assert!(matches!(load_ruleset(param), Err(ConfigFileError::Rules(ConfigError::UnknownParam(_)))));
    }

    #[test]
    fn nested_parameters() {
        let text = r#"
            [params]
            power_pin_nets = { VDD = "VCC", VSS = "GND" }
            [labs.L]
            inputs = ["schematic", "board"]
            rules = ["F6-board-extent", "S4-off-grid"]
            [labs.L.params]
            board_max_extent = 50.8
            [labs.L.rule_params."S4-off-grid"]
            placement_grid = 1.27
        "#;
        let config = parse_config(text).unwrap();
        let lab = &config.labs["L"];
        assert_eq!(lab.params, [("board_max_extent".to_string(), ParamValue::Number("50.8".into()))]);
        assert_eq!(lab.rules[1].params, [("placement_grid".to_string(), ParamValue::Number("1.27".into()))]);
        RuleSet::new(Registry::catalog(), &config).unwrap();
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_config("labs = 3"), Err(ConfigFileError::Structure(_))));
        assert!(matches!(parse_config("[labs.L]\ninputs = [\"pcb\"]\nrules = []"), Err(ConfigFileError::Structure(_))));
        assert!(matches!(parse_config("[labs.L]\ninputs = [\"board\"]\nrules = []\nextra = 1"), Err(ConfigFileError::Structure(_))));
        assert!(matches!(parse_config("[[x"), Err(ConfigFileError::Toml(_))));
    }
}
