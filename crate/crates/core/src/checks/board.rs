use alloc::format;

use crate::eagle::BoardDoc;
use crate::layers::Layer;
use crate::netlist::{board_inconsistencies, Inconsistency};
use crate::rules::{Emitter, RuleContext, RuleError};
use crate::units::Mm;

pub(super) fn board_sch_agree(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let (sch, nl) = ctx.schematic()?;
    let brd = ctx.board()?;
    for issue in board_inconsistencies(sch, nl, brd) {
        let locator = match &issue {
            Inconsistency::MissingElement { part } => format!("part:{part}"),
            Inconsistency::ExtraElement { element } => format!("element:{element}"),
            Inconsistency::SignalMismatch { element, pad, .. } => format!("element:{element}/pad:{pad}"),
            Inconsistency::SignalMissing { signal } => format!("signal:{signal}"),
        };
        out.error(locator, format!("{issue}"));
    }
    Ok(())
}

/// Axis-aligned bounds of the Dimension-layer wires. Arcs are bounded by
/// their end points only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub min_x: Mm,
    pub min_y: Mm,
    pub max_x: Mm,
    pub max_y: Mm,
}

impl Bounds {
    pub fn width(&self) -> Mm {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> Mm {
        self.max_y - self.min_y
    }

    /// Closed-region containment: points on the boundary are inside.
    pub fn contains(&self, x: Mm, y: Mm) -> bool {
        self.min_x <= x && x <= self.max_x && self.min_y <= y && y <= self.max_y
    }
}

pub fn outline_bounds(brd: &BoardDoc) -> Option<Bounds> {
    let mut points = brd.outline_wires().flat_map(|w| [(w.x1, w.y1), (w.x2, w.y2)]);
    let (x, y) = points.next()?;
    let init = Bounds { min_x: x, min_y: y, max_x: x, max_y: y };
    Some(points.fold(init, |b, (x, y)| Bounds {
        min_x: b.min_x.min(x),
        min_y: b.min_y.min(y),
        max_x: b.max_x.max(x),
        max_y: b.max_y.max(y),
    }))
}

pub(super) fn board_extent(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let brd = ctx.board()?;
    let limit = ctx.params.board_max_extent;
    match outline_bounds(brd) {
        None => out.error("board:outline", "NoOutline: the board has no outline on layer 20 (Dimension)"),
        Some(b) if b.width() > limit || b.height() > limit => out.error(
            "board:outline",
            format!("board outline is {} x {} mm; each side must be at most {} mm", b.width(), b.height(), limit),
        ),
        Some(_) => {}
    }
    Ok(())
}

pub(super) fn elements_inside_outline(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let brd = ctx.board()?;
    let Some(bounds) = outline_bounds(brd) else { return Ok(()) };
    for e in brd.elements() {
        if !bounds.contains(e.x, e.y) {
            out.error(
                format!("element:{}", e.name),
                format!(
                    "{} at ({}, {}) lies outside the board outline ({}, {})..({}, {})",
                    e.name, e.x, e.y, bounds.min_x, bounds.min_y, bounds.max_x, bounds.max_y
                ),
            );
        }
    }
    Ok(())
}

pub(super) fn copper_layers(ctx: &RuleContext<'_>, out: &mut Emitter) -> Result<(), RuleError> {
    let brd = ctx.board()?;
    let allowed = &ctx.params.allowed_copper_layers;
    let bad = |l: Layer| l.is_copper() && !allowed.contains(&l.0);
    for signal in brd.signals() {
        for (i, w) in signal.wires.iter().enumerate() {
            if bad(w.layer) {
                out.error(
                    format!("signal:{}/wire:{i}", signal.name),
                    format!("track of {} on copper layer {} is not allowed", signal.name, w.layer),
                );
            }
        }
        for (i, v) in signal.vias.iter().enumerate() {
            let (a, b) = v.extent;
            if bad(a) || bad(b) {
                out.error(
                    format!("signal:{}/via:{i}", signal.name),
                    format!("via of {} spans layers {}-{}, ending on a disallowed layer", signal.name, a.0, b.0),
                );
            }
        }
    }
    Ok(())
}
