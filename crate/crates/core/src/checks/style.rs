use alloc::format;

use crate::eagle::PinDirection;
use crate::netlist::direction_of;
use crate::query::{from, Item, Selection};
use crate::rules::{Emitter, RuleContext, RuleError};
use crate::units::Mm;

fn query_err(e: crate::query::QueryError) -> RuleError {
    RuleError(format!("query failed: {e}"))
}

fn literal_names(sel: Selection<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let sel = sel.with_layer("tNames").and_then(|s| s.without_text(">NAME")).map_err(query_err)?;
    for item in sel.iter() {
        if let Item::Text { text, .. } = item {
            out.warn(
                item.locator(),
                format!("text {:?} on layer 25 (tNames); only >NAME belongs there", text.content),
            );
        }
    }
    Ok(())
}

pub(super) fn tnames_literal(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    if let Some(lib) = ctx.design.library {
        literal_names(from(lib).packages().and_then(|s| s.texts()).map_err(query_err)?, out)?;
    }
    if let Some((sch, _)) = ctx.design.schematic {
        literal_names(from(sch).packages().and_then(|s| s.texts()).map_err(query_err)?, out)?;
        literal_names(from(sch).sheets().and_then(|s| s.texts()).map_err(query_err)?, out)?;
    }
    Ok(())
}

pub(super) fn missing_value(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, _) = ctx.schematic()?;
    for part in sch.parts() {
        let needs_value = sch.deviceset_of(part).uservalue;
        if needs_value && part.value.as_deref().is_none_or(|v| v.trim().is_empty()) {
            out.warn(
                format!("part:{}", part.name),
                format!("{} ({}) needs a value", part.name, part.deviceset),
            );
        }
    }
    Ok(())
}

pub(super) fn dangling_pin(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, nl) = ctx.schematic()?;
    for pin in nl.unconnected_pins() {
        if direction_of(sch, pin) == Some(PinDirection::NotConnected) {
            continue;
        }
        out.warn(
            format!("part:{}/pin:{}.{}", pin.part, pin.gate, pin.pin),
            format!("pin {}.{} is not connected to any net", pin.part, pin.pin),
        );
    }
    Ok(())
}

pub(super) fn off_grid(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, _) = ctx.schematic()?;
    let grid = ctx.params.placement_grid;
    let tolerance = Mm::from_nm(1);
    let instances = from(sch).sheets().and_then(|s| s.instances()).map_err(query_err)?;
    for item in instances.iter() {
        if let Item::Instance { instance, .. } = item {
            if !instance.x.is_multiple_of(grid, tolerance) || !instance.y.is_multiple_of(grid, tolerance) {
                out.warn(
                    item.locator(),
                    format!(
                        "{} gate {} at ({}, {}) is off the {} mm grid",
                        instance.part, instance.gate, instance.x, instance.y, grid
                    ),
                );
            }
        }
    }
    Ok(())
}
