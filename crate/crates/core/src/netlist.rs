//! Pin-level connectivity derived from a schematic.
//!
//! Nets are joined across sheets by exact name. Two differently named nets
//! that share a pin (the same pin listed in both) are electrically one node;
//! the merged [`ElectricalNet`] is keyed by the smallest of its names and
//! keeps every name as an alias.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::eagle::{BoardDoc, PinDirection, SchematicDoc};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PinInstance {
    pub part: String,
    pub gate: String,
    pub pin: String,
}

impl PinInstance {
    pub fn new(part: impl Into<String>, gate: impl Into<String>, pin: impl Into<String>) -> Self {
        PinInstance { part: part.into(), gate: gate.into(), pin: pin.into() }
    }
}

impl fmt::Display for PinInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.part, self.gate, self.pin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectricalNet {
    name: String,
    aliases: BTreeSet<String>,
    members: BTreeSet<PinInstance>,
}

impl ElectricalNet {
    /// Canonical name: the smallest of the merged net names.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Every schematic net name that resolves to this node (includes `name`).
    pub fn aliases(&self) -> &BTreeSet<String> {
        &self.aliases
    }

    pub fn has_alias(&self, name: &str) -> bool {
        self.aliases.contains(name)
    }

    pub fn members(&self) -> &BTreeSet<PinInstance> {
        &self.members
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("unknown pin {0}")]
    UnknownPin(PinInstance),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    nets: BTreeMap<String, ElectricalNet>,
    aliases: BTreeMap<String, String>,
    pin_index: BTreeMap<PinInstance, String>,
    unconnected: BTreeSet<PinInstance>,
    known_pins: BTreeSet<PinInstance>,
    pinref_count: usize,
}

static NO_PINS: BTreeSet<PinInstance> = BTreeSet::new();

impl Netlist {
    pub fn nets(&self) -> impl ExactSizeIterator<Item = &ElectricalNet> {
        self.nets.values()
    }

    pub fn net_count(&self) -> usize {
        self.nets.len()
    }

    /// Looks a net up by any of its names.
    pub fn net(&self, name: &str) -> Option<&ElectricalNet> {
        self.aliases.get(name).and_then(|canonical| self.nets.get(canonical))
    }

    pub fn pin_index(&self) -> &BTreeMap<PinInstance, String> {
        &self.pin_index
    }

    pub fn unconnected_pins(&self) -> &BTreeSet<PinInstance> {
        &self.unconnected
    }

    /// Number of `<pinref>` attachments in the schematic, duplicates included.
    pub fn pinref_count(&self) -> usize {
        self.pinref_count
    }

    /// Canonical name of the net holding `pin`, `None` when unconnected.
    pub fn net_of(&self, pin: &PinInstance) -> Result<Option<&str>, NetlistError> {
        match self.pin_index.get(pin) {
            Some(name) => Ok(Some(name)),
            None if self.known_pins.contains(pin) => Ok(None),
            None => Err(NetlistError::UnknownPin(pin.clone())),
        }
    }

    /// The electrical net holding `pin`, if it is connected.
    pub fn electrical_net_of(&self, pin: &PinInstance) -> Option<&ElectricalNet> {
        self.pin_index.get(pin).and_then(|n| self.nets.get(n))
    }

    /// Members of the named net; empty for unknown names.
    pub fn pins_of(&self, net_name: &str) -> &BTreeSet<PinInstance> {
        self.net(net_name).map_or(&NO_PINS, |n| &n.members)
    }

    /// Connected pins of one part, in (gate, pin) order.
    pub fn connected_pins_of<'a>(&'a self, part: &'a str) -> impl Iterator<Item = (&'a PinInstance, &'a str)> + 'a {
        self.pin_index
            .range(PinInstance::new(part, "", "")..)
            .take_while(move |(p, _)| p.part == part)
            .map(|(p, n)| (p, n.as_str()))
    }
}

/// Derives the netlist of a schematic.
pub fn build_netlist(sch: &SchematicDoc) -> Netlist {
    let mut pins_by_net: BTreeMap<&str, BTreeSet<PinInstance>> = BTreeMap::new();
    let mut nets_by_pin: BTreeMap<PinInstance, BTreeSet<&str>> = BTreeMap::new();
    let mut pinref_count = 0;

    for sheet in sch.sheets() {
        for net in &sheet.nets {
            let members = pins_by_net.entry(net.name.as_str()).or_default();
            for r in net.pinrefs() {
                pinref_count += 1;
                let pin = PinInstance::new(r.part.as_str(), r.gate.as_str(), r.pin.as_str());
                nets_by_pin.entry(pin.clone()).or_default().insert(net.name.as_str());
                members.insert(pin);
            }
        }
    }

    // Breadth-first search over the net/pin incidence graph; names visited in
    // sorted order so the first name of each component is its smallest.
    let mut nets = BTreeMap::new();
    let mut aliases = BTreeMap::new();
    let mut pin_index = BTreeMap::new();
    let mut visited: BTreeSet<&str> = BTreeSet::new();
    for &start in pins_by_net.keys() {
        if !visited.insert(start) {
            continue;
        }
        let mut names = BTreeSet::new();
        let mut members = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(name) = queue.pop_front() {
            names.insert(String::from(name));
            for pin in &pins_by_net[name] {
                for &other in &nets_by_pin[pin] {
                    if visited.insert(other) {
                        queue.push_back(other);
                    }
                }
                members.insert(pin.clone());
            }
        }
        let canonical = String::from(start);
        for n in &names {
            aliases.insert(n.clone(), canonical.clone());
        }
        for m in &members {
            pin_index.insert(m.clone(), canonical.clone());
        }
        nets.insert(canonical.clone(), ElectricalNet { name: canonical, aliases: names, members });
    }

    let mut known_pins = BTreeSet::new();
    let mut placed = BTreeSet::new();
    for part in sch.parts() {
        for (gate, pin) in sch.gate_pins(part) {
            known_pins.insert(PinInstance::new(part.name.as_str(), gate.name.as_str(), pin.name.as_str()));
        }
    }
    for sheet in sch.sheets() {
        for inst in &sheet.instances {
            let Some(part) = sch.part(&inst.part) else { continue };
            let Some(symbol) = sch.symbol_of(part, &inst.gate) else { continue };
            for pin in &symbol.pins {
                placed.insert(PinInstance::new(inst.part.as_str(), inst.gate.as_str(), pin.name.as_str()));
            }
        }
    }
    let unconnected = placed.into_iter().filter(|p| !pin_index.contains_key(p)).collect();

    Netlist { nets, aliases, pin_index, unconnected, known_pins, pinref_count }
}

/// Symbol pin direction of a pin instance, if it resolves.
pub fn direction_of(sch: &SchematicDoc, pin: &PinInstance) -> Option<PinDirection> {
    sch.resolve_pin(&pin.part, &pin.gate, &pin.pin).map(|p| p.direction)
}

/// One disagreement between a schematic and its board.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Inconsistency {
    /// A schematic part with a package has no board element.
    MissingElement { part: String },
    /// A board element has no schematic part.
    ExtraElement { element: String },
    /// A pad's board signal differs from its pin's schematic net.
    SignalMismatch {
        element: String,
        pad: String,
        pin: PinInstance,
        schematic_net: Option<String>,
        board_signal: Option<String>,
    },
    /// A board signal named after no schematic net.
    SignalMissing { signal: String },
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let or_none = |s: &Option<String>| s.clone().unwrap_or_else(|| String::from("(none)"));
        match self {
            Inconsistency::MissingElement { part } => write!(f, "part {part} has no board element"),
            Inconsistency::ExtraElement { element } => {
                write!(f, "board element {element} has no schematic part")
            }
            Inconsistency::SignalMismatch { element, pad, pin, schematic_net, board_signal } => write!(
                f,
                "pad {element}:{pad} is in board signal {} but pin {pin} is on schematic net {}",
                or_none(board_signal),
                or_none(schematic_net),
            ),
            Inconsistency::SignalMissing { signal } => {
                write!(f, "board signal {signal} does not exist in the schematic")
            }
        }
    }
}

/// Cross-checks a board against its schematic; an empty list means they agree.
pub fn check_board_consistency(sch: &SchematicDoc, brd: &BoardDoc) -> Vec<Inconsistency> {
    board_inconsistencies(sch, &build_netlist(sch), brd)
}

/// As [`check_board_consistency`], reusing an already built netlist.
pub fn board_inconsistencies(sch: &SchematicDoc, nl: &Netlist, brd: &BoardDoc) -> Vec<Inconsistency> {
    let mut out = Vec::new();

    for part in sch.parts() {
        if sch.package_of(part).is_none() {
            continue;
        }
        let Some(element) = brd.element(&part.name) else {
            out.push(Inconsistency::MissingElement { part: part.name.clone() });
            continue;
        };
        let package = brd.package_of(element);
        let device = sch.device_of(part);
        for (gate, pin) in sch.gate_pins(part) {
            let pin = PinInstance::new(part.name.as_str(), gate.name.as_str(), pin.name.as_str());
            let net = nl.electrical_net_of(&pin);
            for pad in device.pads_for(&gate.name, &pin.pin) {
                if !package.has_pad(pad) {
                    continue;
                }
                let signal = brd.signal_of_pad(&element.name, pad);
                let agrees = match (net, signal) {
                    (None, None) => true,
                    (Some(net), Some(signal)) => net.has_alias(signal),
                    _ => false,
                };
                if !agrees {
                    out.push(Inconsistency::SignalMismatch {
                        element: element.name.clone(),
                        pad: pad.clone(),
                        pin: pin.clone(),
                        schematic_net: net.map(|n| n.name().into()),
                        board_signal: signal.map(Into::into),
                    });
                }
            }
        }
    }

    for element in brd.elements() {
        if sch.part(&element.name).is_none() {
            out.push(Inconsistency::ExtraElement { element: element.name.clone() });
        }
    }
    for signal in brd.signals() {
        if nl.net(&signal.name).is_none() {
            out.push(Inconsistency::SignalMissing { signal: signal.name.clone() });
        }
    }

    out.sort();
    out
}
