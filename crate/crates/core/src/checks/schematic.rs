use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::eagle::{Part, PinDirection, SchematicDoc};
use crate::glob::glob_match;
use crate::netlist::PinInstance;
use crate::pattern::match_pattern;
use crate::rules::{Emitter, RuleContext, RuleError};

fn mcus<'a>(sch: &'a SchematicDoc, glob: &str) -> Vec<&'a Part> {
    sch.parts().iter().filter(|p| glob_match(glob, &p.name)).collect()
}

pub(super) fn status_led(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, nl) = ctx.schematic()?;
    let params = ctx.params;
    let Some(mcu) = mcus(sch, &params.mcu_part).first().copied() else {
        out.error("schematic", format!("no part matches the MCU name {:?}", params.mcu_part));
        return Ok(());
    };
    let pattern = params.status_led_pattern().map_err(|e| RuleError(format!("{e}")))?;
    if match_pattern(nl, sch, &pattern).is_empty() {
        out.error(
            format!("part:{}", mcu.name),
            format!(
                "{} pin {} must drive the status LED through a series resistor into the LED anode, \
                 with the cathode on {}",
                mcu.name, params.led_pin, params.ground_net
            ),
        );
    }
    Ok(())
}

pub(super) fn reset_wiring(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, nl) = ctx.schematic()?;
    let params = ctx.params;
    for mcu in mcus(sch, &params.mcu_part) {
        let pattern = params.reset_pattern(&mcu.name).map_err(|e| RuleError(format!("{e}")))?;
        let pulled_up = !match_pattern(nl, sch, &pattern).is_empty();
        for (gate, pin) in sch.gate_pins(mcu) {
            if !glob_match(&params.reset_pin, &pin.name) {
                continue;
            }
            let instance = PinInstance::new(mcu.name.as_str(), gate.name.as_str(), pin.name.as_str());
            let locator = format!("part:{}/pin:{}.{}", mcu.name, gate.name, pin.name);
            match nl.net_of(&instance) {
                Ok(Some(net)) if !pulled_up => out.error(
                    locator,
                    format!(
                        "{}.{} (net {net}) is mis-wired: it needs a pull-up resistor to {}",
                        mcu.name, pin.name, params.supply_net
                    ),
                ),
                Ok(Some(_)) => {}
                Ok(None) | Err(_) => out.warn(
                    locator,
                    format!("{}.{} is not connected; the reset pull-up is missing", mcu.name, pin.name),
                ),
            }
        }
    }
    Ok(())
}

pub(super) fn power_short(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, nl) = ctx.schematic()?;
    let params = ctx.params;
    let power: BTreeSet<&str> = params.power_net_names.iter().map(String::as_str).collect();
    for net in nl.nets() {
        let merged: Vec<&str> = net.aliases().iter().map(String::as_str).filter(|a| power.contains(a)).collect();
        let mut expected: BTreeSet<&str> = BTreeSet::new();
        for pin in net.members() {
            let Some(p) = sch.resolve_pin(&pin.part, &pin.gate, &pin.pin) else { continue };
            if p.direction != PinDirection::Power {
                continue;
            }
            if let Some(rail) = params.power_pin_nets.get(&pin.pin) {
                if power.contains(rail.as_str()) {
                    expected.insert(rail);
                }
            }
        }
        let mut reasons = Vec::new();
        if merged.len() >= 2 {
            reasons.push(format!("power nets {} are joined", merged.join(", ")));
        }
        if expected.len() >= 2 {
            let rails: Vec<&str> = expected.into_iter().collect();
            reasons.push(format!("it joins power pins of rails {}", rails.join(", ")));
        }
        if !reasons.is_empty() {
            out.error(format!("net:{}", net.name()), format!("short on net {}: {}", net.name(), reasons.join("; ")));
        }
    }
    Ok(())
}

pub(super) fn decoupling(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, nl) = ctx.schematic()?;
    let params = ctx.params;
    let ground = nl.net(&params.ground_net);
    let caps: Vec<&Part> = sch
        .parts()
        .iter()
        .filter(|p| glob_match(&params.decoupling_cap_deviceset, &p.deviceset))
        .collect();

    for part in sch.parts().iter().filter(|p| glob_match(&params.decoupled_parts, &p.name)) {
        for (gate, pin) in sch.gate_pins(part) {
            if pin.direction != PinDirection::Power {
                continue;
            }
            let instance = PinInstance::new(part.name.as_str(), gate.name.as_str(), pin.name.as_str());
            let Some(net) = nl.electrical_net_of(&instance) else { continue };
            let is_power = params.power_net_names.iter().any(|n| net.has_alias(n));
            if !is_power || net.has_alias(&params.ground_net) {
                continue;
            }
            let bridged = ground.is_some_and(|gnd| {
                caps.iter().any(|cap| {
                    let on = |n: &str| nl.connected_pins_of(&cap.name).any(|(_, net)| net == n);
                    on(net.name()) && on(gnd.name())
                })
            });
            if !bridged {
                out.error(
                    format!("part:{}/pin:{}.{}", part.name, gate.name, pin.name),
                    format!(
                        "{}.{} on {} has no decoupling capacitor to {}",
                        part.name, pin.name, net.name(), params.ground_net
                    ),
                );
            }
        }
    }
    Ok(())
}
