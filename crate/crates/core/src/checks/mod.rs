//! The built-in rule catalog.
//!
//! | id | phase | checks |
//! |----|-------|--------|
//! | `S1-tnames-literal` | quick | text on tNames (25) other than `>NAME` |
//! | `S2-missing-value` | quick | user-value parts without a value |
//! | `S3-dangling-pin` | quick | placed pins on no net (except `nc` pins) |
//! | `S4-off-grid` | quick | instances off the placement grid |
//! | `F1-status-led` | full | MCU pin → resistor → LED anode, cathode → ground |
//! | `F2-reset-wiring` | full | reset pulled up through a resistor; missing reset warns |
//! | `F3-power-short` | full | power nets merged or power pins of different rails joined |
//! | `F4-decoupling` | full | IC power pins bypassed to ground by a capacitor |
//! | `F5-board-sch-agree` | full | board matches schematic |
//! | `F6-board-extent` | full | outline present and within the size limit |
//! | `F7-elements-inside-outline` | full | element origins inside the outline box |
//! | `F8-copper-layers` | full | tracks and vias only on allowed copper layers |

mod board;
mod schematic;
mod style;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::pattern::{compile_pattern, PathPattern};
use crate::rules::{AppliesTo, ConfigError, ParamValue, Phase, Rule, Severity};
use crate::units::Mm;

/// Tunable inputs of the catalog. Every field can be overridden from the
/// rule-set configuration, globally, per lab or per rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckParams {
    pub board_max_extent: Mm,
    pub allowed_copper_layers: BTreeSet<u8>,
    pub placement_grid: Mm,
    pub decoupling_cap_deviceset: String,
    pub decoupled_parts: String,
    pub power_net_names: Vec<String>,
    /// Power pin name → the power net it must sit on.
    pub power_pin_nets: BTreeMap<String, String>,
    pub ground_net: String,
    pub supply_net: String,
    pub mcu_part: String,
    pub led_pin: String,
    pub reset_pin: String,
    pub resistor_deviceset: String,
    pub led_deviceset: String,
    pub led_anode_pin: String,
    pub led_cathode_pin: String,
    /// Replaces the generated status-LED pattern; `{mcu}` expands to `mcu_part`.
    pub status_led_pattern: Option<String>,
    /// Replaces the generated reset pattern; `{mcu}` expands to the MCU part name.
    pub reset_pattern: Option<String>,
}

impl Default for CheckParams {
    fn default() -> Self {
        let s = String::from;
        CheckParams {
            board_max_extent: Mm::from_mm(100),
            allowed_copper_layers: [1, 2, 15, 16].into_iter().collect(),
            placement_grid: Mm::from_nm(2_540_000),
            decoupling_cap_deviceset: s("C*"),
            decoupled_parts: s("U*"),
            power_net_names: vec![s("VCC"), s("GND"), s("3V3")],
            power_pin_nets: [(s("VCC"), s("VCC")), (s("GND"), s("GND"))].into_iter().collect(),
            ground_net: s("GND"),
            supply_net: s("VCC"),
            mcu_part: s("U1"),
            led_pin: s("PB5"),
            reset_pin: s("RESET"),
            resistor_deviceset: s("RESISTOR*"),
            led_deviceset: s("LED*"),
            led_anode_pin: s("A"),
            led_cathode_pin: s("C"),
            status_led_pattern: None,
            reset_pattern: None,
        }
    }
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::BadParam { key: key.into(), message: message.into() }
}

fn text(key: &str, v: &ParamValue) -> Result<String, ConfigError> {
    match v {
        ParamValue::Text(s) => Ok(s.clone()),
        other => Err(bad(key, format!("expected a string, got {other}"))),
    }
}

fn positive_mm(key: &str, v: &ParamValue) -> Result<Mm, ConfigError> {
    let ParamValue::Number(n) = v else {
        return Err(bad(key, format!("expected a number of millimetres, got {v}")));
    };
    let mm = Mm::parse(n).map_err(|_| bad(key, format!("invalid length {n}")))?;
    if mm <= Mm::ZERO {
        return Err(bad(key, "must be greater than zero"));
    }
    Ok(mm)
}

fn list<T>(key: &str, v: &ParamValue, item: impl Fn(&ParamValue) -> Option<T>) -> Result<Vec<T>, ConfigError> {
    let ParamValue::List(items) = v else {
        return Err(bad(key, format!("expected a list, got {v}")));
    };
    items.iter().map(|i| item(i).ok_or_else(|| bad(key, format!("invalid list item {i}")))).collect()
}

/// Globs and names are spliced into pattern text, so they must not contain
/// pattern punctuation.
fn pattern_safe(key: &str, value: &str) -> Result<(), ConfigError> {
    if value.is_empty() || value.contains(|c: char| c.is_whitespace() || "(),=".contains(c)) {
        return Err(bad(key, format!("{value:?} must be non-empty without spaces, parentheses, commas or '='")));
    }
    Ok(())
}

impl CheckParams {
    pub fn apply(&mut self, key: &str, value: &ParamValue) -> Result<(), ConfigError> {
        match key {
            "board_max_extent" => self.board_max_extent = positive_mm(key, value)?,
            "placement_grid" => self.placement_grid = positive_mm(key, value)?,
            "allowed_copper_layers" => {
                let layers = list(key, value, |i| match i {
                    ParamValue::Number(n) => n.parse::<u8>().ok().filter(|l| (1..=16).contains(l)),
                    _ => None,
                })?;
                self.allowed_copper_layers = layers.into_iter().collect();
            }
            "power_net_names" => {
                self.power_net_names = list(key, value, |i| match i {
                    ParamValue::Text(s) => Some(s.clone()),
                    _ => None,
                })?;
            }
            "power_pin_nets" => {
                let ParamValue::Table(entries) = value else {
                    return Err(bad(key, format!("expected a table, got {value}")));
                };
                self.power_pin_nets = entries
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), text(key, v)?)))
                    .collect::<Result<_, ConfigError>>()?;
            }
            "decoupling_cap_deviceset" => self.decoupling_cap_deviceset = text(key, value)?,
            "decoupled_parts" => self.decoupled_parts = text(key, value)?,
            "ground_net" => self.ground_net = text(key, value)?,
            "supply_net" => self.supply_net = text(key, value)?,
            "mcu_part" => self.mcu_part = text(key, value)?,
            "led_pin" => self.led_pin = text(key, value)?,
            "reset_pin" => self.reset_pin = text(key, value)?,
            "resistor_deviceset" => self.resistor_deviceset = text(key, value)?,
            "led_deviceset" => self.led_deviceset = text(key, value)?,
            "led_anode_pin" => self.led_anode_pin = text(key, value)?,
            "led_cathode_pin" => self.led_cathode_pin = text(key, value)?,
            "status_led_pattern" => self.status_led_pattern = Some(text(key, value)?),
            "reset_pattern" => self.reset_pattern = Some(text(key, value)?),
            _ => return Err(ConfigError::UnknownParam(key.into())),
        }
        Ok(())
    }

    pub fn apply_all(&mut self, overrides: &[(String, ParamValue)]) -> Result<(), ConfigError> {
        overrides.iter().try_for_each(|(k, v)| self.apply(k, v))
    }

    /// Checks that the generated patterns compile.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, value) in [
            ("ground_net", &self.ground_net),
            ("supply_net", &self.supply_net),
            ("mcu_part", &self.mcu_part),
            ("led_pin", &self.led_pin),
            ("reset_pin", &self.reset_pin),
            ("resistor_deviceset", &self.resistor_deviceset),
            ("led_deviceset", &self.led_deviceset),
            ("led_anode_pin", &self.led_anode_pin),
            ("led_cathode_pin", &self.led_cathode_pin),
        ] {
            pattern_safe(key, value)?;
        }
        self.status_led_pattern()
            .map_err(|e| bad("status_led_pattern", format!("{e}")))?;
        self.reset_pattern("MCU").map_err(|e| bad("reset_pattern", format!("{e}")))?;
        Ok(())
    }

    pub fn status_led_pattern(&self) -> Result<PathPattern, crate::pattern::PatternError> {
        let text = match &self.status_led_pattern {
            Some(t) => t.replace("{mcu}", &self.mcu_part),
            None => format!(
                "part(name={}) pin({}) net(*) pin(*) part(deviceset={}) pin(*) net(*) pin({}) part(deviceset={}) pin({}) net({})",
                self.mcu_part,
                self.led_pin,
                self.resistor_deviceset,
                self.led_anode_pin,
                self.led_deviceset,
                self.led_cathode_pin,
                self.ground_net,
            ),
        };
        compile_pattern(&text)
    }

    pub fn reset_pattern(&self, mcu: &str) -> Result<PathPattern, crate::pattern::PatternError> {
        let text = match &self.reset_pattern {
            Some(t) => t.replace("{mcu}", mcu),
            None => format!(
                "part(name={mcu}) pin({}) net(*) pin(*) part(deviceset={}) pin(*) net({})",
                self.reset_pin, self.resistor_deviceset, self.supply_net,
            ),
        };
        compile_pattern(&text)
    }
}

pub const S1_TNAMES_LITERAL: &str = "S1-tnames-literal";
pub const S2_MISSING_VALUE: &str = "S2-missing-value";
pub const S3_DANGLING_PIN: &str = "S3-dangling-pin";
pub const S4_OFF_GRID: &str = "S4-off-grid";
pub const F1_STATUS_LED: &str = "F1-status-led";
pub const F2_RESET_WIRING: &str = "F2-reset-wiring";
pub const F3_POWER_SHORT: &str = "F3-power-short";
pub const F4_DECOUPLING: &str = "F4-decoupling";
pub const F5_BOARD_SCH_AGREE: &str = "F5-board-sch-agree";
pub const F6_BOARD_EXTENT: &str = "F6-board-extent";
pub const F7_ELEMENTS_INSIDE_OUTLINE: &str = "F7-elements-inside-outline";
pub const F8_COPPER_LAYERS: &str = "F8-copper-layers";

pub(crate) fn catalog() -> Vec<Rule> {
    use AppliesTo::*;
    use Phase::*;
    use Severity::*;
    let rule = |id, title, severity, phase, applies_to, check| Rule {
        id,
        title,
        severity,
        phase,
        applies_to,
        waivable: true,
        check,
    };
    vec![
        rule(S1_TNAMES_LITERAL, "tNames text other than >NAME", Warning, Quick, LibraryOrSchematic, style::tnames_literal),
        rule(S2_MISSING_VALUE, "part value missing", Warning, Quick, Schematic, style::missing_value),
        rule(S3_DANGLING_PIN, "unconnected pin", Warning, Quick, Schematic, style::dangling_pin),
        rule(S4_OFF_GRID, "instance off the placement grid", Warning, Quick, Schematic, style::off_grid),
        rule(F1_STATUS_LED, "status LED wiring", Error, Full, Schematic, schematic::status_led),
        rule(F2_RESET_WIRING, "reset wiring", Error, Full, Schematic, schematic::reset_wiring),
        Rule { waivable: false, ..rule(F3_POWER_SHORT, "power rails shorted", Error, Full, Schematic, schematic::power_short) },
        rule(F4_DECOUPLING, "missing decoupling capacitor", Error, Full, Schematic, schematic::decoupling),
        rule(F5_BOARD_SCH_AGREE, "board disagrees with schematic", Error, Full, SchematicBoardPair, board::board_sch_agree),
        rule(F6_BOARD_EXTENT, "board outline too large or missing", Error, Full, Board, board::board_extent),
        rule(F7_ELEMENTS_INSIDE_OUTLINE, "element outside the board outline", Error, Full, Board, board::elements_inside_outline),
        rule(F8_COPPER_LAYERS, "copper on a disallowed layer", Error, Full, Board, board::copper_layers),
    ]
}
