//! Typed, validated models of Eagle XML design files.
//!
//! Three document kinds are supported: schematics (`.sch`), boards (`.brd`)
//! and libraries (`.lbr`). The kind is taken from the XML content. Every
//! cross reference (part to deviceset, pinref to symbol pin, contactref to
//! pad, connect to pad) is resolved while parsing, so a document that parses
//! contains no dangling names. Documents expose read-only accessors only.

mod parse;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::layers::Layer;
use crate::units::Mm;

pub use parse::{parse_board, parse_document, parse_library, parse_schematic};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("not an Eagle schematic")]
    NotASchematic,
    #[error("not an Eagle board")]
    NotABoard,
    #[error("not an Eagle library")]
    NotALibrary,
    #[error("not an Eagle design file (expected <eagle><drawing> with a schematic, board or library)")]
    NotAnEagleFile,
    #[error("unsupported Eagle version {0:?} (6.x through 9.x are accepted)")]
    UnsupportedVersion(String),
    #[error("broken reference {reference}: {context}")]
    BrokenReference { reference: String, context: String },
    #[error("duplicate {kind} name {name:?}")]
    DuplicateName { kind: &'static str, name: String },
    #[error("line {line}: <{element}> is missing attribute {attribute:?}")]
    MissingAttribute { element: String, attribute: &'static str, line: u32 },
    #[error("line {line}: <{element}> has invalid {attribute}={value:?}")]
    InvalidAttribute { element: String, attribute: &'static str, value: String, line: u32 },
}

/// Orientation as written by Eagle in a `rot` attribute, e.g. `R90` or `MR180`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rotation {
    pub degrees: u16,
    pub mirrored: bool,
    pub spin: bool,
}

impl Rotation {
    pub fn parse(text: &str) -> Option<Rotation> {
        let mut rest = text;
        let spin = rest.starts_with('S');
        if spin {
            rest = &rest[1..];
        }
        let mirrored = rest.starts_with('M');
        if mirrored {
            rest = &rest[1..];
        }
        let digits = rest.strip_prefix('R')?;
        // Eagle writes whole degrees in practice; "R90.0" is tolerated.
        let digits = digits.strip_suffix(".0").unwrap_or(digits);
        let degrees: u16 = digits.parse().ok()?;
        if degrees >= 360 {
            return None;
        }
        Some(Rotation { degrees, mirrored, spin })
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spin {
            f.write_str("S")?;
        }
        if self.mirrored {
            f.write_str("M")?;
        }
        write!(f, "R{}", self.degrees)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct TextItem {
    pub content: String,
    pub layer: Layer,
    pub x: Mm,
    pub y: Mm,
}

/// A straight (or arc, when `curve` is set) graphic or copper segment.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Wire {
    pub x1: Mm,
    pub y1: Mm,
    pub x2: Mm,
    pub y2: Mm,
    pub width: Mm,
    pub layer: Layer,
    /// Arc angle in degrees as written by Eagle; `None` for straight wires.
    pub curve: Option<String>,
}

// ---------------------------------------------------------------------------
// Libraries

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Smd {
    pub name: String,
    pub x: Mm,
    pub y: Mm,
    pub dx: Mm,
    pub dy: Mm,
    pub layer: Layer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct ThruPad {
    pub name: String,
    pub x: Mm,
    pub y: Mm,
    pub drill: Mm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Package {
    pub name: String,
    pub smds: Vec<Smd>,
    pub pads: Vec<ThruPad>,
    pub texts: Vec<TextItem>,
    pub wires: Vec<Wire>,
}

impl Package {
    pub fn has_pad(&self, name: &str) -> bool {
        self.smds.iter().any(|s| s.name == name) || self.pads.iter().any(|p| p.name == name)
    }

    /// Names of all SMD and through-hole pads, SMDs first, in document order.
    pub fn pad_names(&self) -> impl Iterator<Item = &str> {
        self.smds.iter().map(|s| s.name.as_str()).chain(self.pads.iter().map(|p| p.name.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PinDirection {
    Passive,
    Input,
    Output,
    InOut,
    Power,
    Supply,
    NotConnected,
    /// `oc`, `hiz` and any value newer Eagle versions add.
    Other,
}

impl PinDirection {
    fn from_eagle(text: &str) -> PinDirection {
        match text {
            "pas" => PinDirection::Passive,
            "in" => PinDirection::Input,
            "out" => PinDirection::Output,
            "io" => PinDirection::InOut,
            "pwr" => PinDirection::Power,
            "sup" => PinDirection::Supply,
            "nc" => PinDirection::NotConnected,
            _ => PinDirection::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PinDirection::Passive => "pas",
            PinDirection::Input => "in",
            PinDirection::Output => "out",
            PinDirection::InOut => "io",
            PinDirection::Power => "pwr",
            PinDirection::Supply => "sup",
            PinDirection::NotConnected => "nc",
            PinDirection::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Pin {
    pub name: String,
    pub x: Mm,
    pub y: Mm,
    pub direction: PinDirection,
    pub visible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Symbol {
    pub name: String,
    pub pins: Vec<Pin>,
}

impl Symbol {
    pub fn pin(&self, name: &str) -> Option<&Pin> {
        self.pins.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Gate {
    pub name: String,
    pub symbol: String,
    pub x: Mm,
    pub y: Mm,
}

/// Maps one symbol pin to one or more package pads.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Connect {
    pub gate: String,
    pub pin: String,
    pub pads: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Device {
    pub name: String,
    /// `None` for virtual devices (frames, supply symbols).
    pub package: Option<String>,
    pub connects: Vec<Connect>,
}

impl Device {
    pub fn pads_for(&self, gate: &str, pin: &str) -> &[String] {
        self.connects
            .iter()
            .find(|c| c.gate == gate && c.pin == pin)
            .map_or(&[][..], |c| &c.pads[..])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct DeviceSet {
    pub name: String,
    pub prefix: String,
    pub uservalue: bool,
    pub gates: Vec<Gate>,
    pub devices: Vec<Device>,
}

impl DeviceSet {
    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn device(&self, name: &str) -> Option<&Device> {
        self.devices.iter().find(|d| d.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LibraryDoc {
    version: String,
    name: String,
    urn: Option<String>,
    packages: Vec<Package>,
    symbols: Vec<Symbol>,
    devicesets: Vec<DeviceSet>,
}

impl LibraryDoc {
    pub fn version(&self) -> &str {
        &self.version
    }

    /// Library name; empty for standalone `.lbr` files, which carry none.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn urn(&self) -> Option<&str> {
        self.urn.as_deref()
    }

    pub fn packages(&self) -> &[Package] {
        &self.packages
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn devicesets(&self) -> &[DeviceSet] {
        &self.devicesets
    }

    pub fn package(&self, name: &str) -> Option<&Package> {
        self.packages.iter().find(|p| p.name == name)
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| s.name == name)
    }

    pub fn deviceset(&self, name: &str) -> Option<&DeviceSet> {
        self.devicesets.iter().find(|d| d.name == name)
    }
}

// ---------------------------------------------------------------------------
// Schematics

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Part {
    pub name: String,
    pub library: String,
    pub library_urn: Option<String>,
    pub deviceset: String,
    pub device: String,
    pub value: Option<String>,
    pub attributes: BTreeMap<String, String>,
    lib_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Instance {
    pub part: String,
    pub gate: String,
    pub x: Mm,
    pub y: Mm,
    pub rotation: Rotation,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[non_exhaustive]
pub struct PinRef {
    pub part: String,
    pub gate: String,
    pub pin: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Label {
    pub x: Mm,
    pub y: Mm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Segment {
    pub pinrefs: Vec<PinRef>,
    pub labels: Vec<Label>,
    pub wires: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Net {
    pub name: String,
    pub class: u8,
    pub segments: Vec<Segment>,
}

impl Net {
    pub fn pinrefs(&self) -> impl Iterator<Item = &PinRef> {
        self.segments.iter().flat_map(|s| s.pinrefs.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Sheet {
    pub instances: Vec<Instance>,
    pub nets: Vec<Net>,
    pub texts: Vec<TextItem>,
    pub plain_wires: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchematicDoc {
    version: String,
    libraries: Vec<LibraryDoc>,
    parts: Vec<Part>,
    sheets: Vec<Sheet>,
}

impl SchematicDoc {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn libraries(&self) -> &[LibraryDoc] {
        &self.libraries
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }

    pub fn library_of(&self, part: &Part) -> &LibraryDoc {
        &self.libraries[part.lib_index]
    }

    pub fn deviceset_of(&self, part: &Part) -> &DeviceSet {
        self.library_of(part)
            .deviceset(&part.deviceset)
            .expect("deviceset resolved at parse time")
    }

    pub fn device_of(&self, part: &Part) -> &Device {
        self.deviceset_of(part)
            .device(&part.device)
            .expect("device resolved at parse time")
    }

    /// Package of the part's device, `None` for virtual parts.
    pub fn package_of(&self, part: &Part) -> Option<&Package> {
        let name = self.device_of(part).package.as_deref()?;
        self.library_of(part).package(name)
    }

    pub fn symbol_of(&self, part: &Part, gate: &str) -> Option<&Symbol> {
        let gate = self.deviceset_of(part).gate(gate)?;
        self.library_of(part).symbol(&gate.symbol)
    }

    /// Looks up the symbol pin behind a (part, gate, pin) triple.
    pub fn resolve_pin(&self, part: &str, gate: &str, pin: &str) -> Option<&Pin> {
        let part = self.part(part)?;
        self.symbol_of(part, gate)?.pin(pin)
    }

    /// Every (gate, pin) pair of the part's deviceset, in gate then pin order.
    pub fn gate_pins<'a>(&'a self, part: &'a Part) -> impl Iterator<Item = (&'a Gate, &'a Pin)> + 'a {
        let lib = self.library_of(part);
        self.deviceset_of(part).gates.iter().flat_map(move |g| {
            lib.symbol(&g.symbol)
                .into_iter()
                .flat_map(|s| s.pins.iter())
                .map(move |p| (g, p))
        })
    }
}

// ---------------------------------------------------------------------------
// Boards

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Element {
    pub name: String,
    pub library: String,
    pub library_urn: Option<String>,
    pub package: String,
    pub value: String,
    pub x: Mm,
    pub y: Mm,
    pub rotation: Rotation,
    pub mirrored: bool,
    lib_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[non_exhaustive]
pub struct ContactRef {
    pub element: String,
    pub pad: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Via {
    pub x: Mm,
    pub y: Mm,
    /// First and last copper layer of the span, from `extent="1-16"`.
    pub extent: (Layer, Layer),
    pub drill: Mm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub struct Signal {
    pub name: String,
    pub contactrefs: Vec<ContactRef>,
    pub wires: Vec<Wire>,
    pub vias: Vec<Via>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardDoc {
    version: String,
    libraries: Vec<LibraryDoc>,
    elements: Vec<Element>,
    signals: Vec<Signal>,
    plain_wires: Vec<Wire>,
    plain_texts: Vec<TextItem>,
}

impl BoardDoc {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn libraries(&self) -> &[LibraryDoc] {
        &self.libraries
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn package_of(&self, element: &Element) -> &Package {
        self.libraries[element.lib_index]
            .package(&element.package)
            .expect("package resolved at parse time")
    }

    pub fn plain_wires(&self) -> &[Wire] {
        &self.plain_wires
    }

    pub fn plain_texts(&self) -> &[TextItem] {
        &self.plain_texts
    }

    /// Board outline: the plain wires on the Dimension layer.
    pub fn outline_wires(&self) -> impl Iterator<Item = &Wire> {
        self.plain_wires.iter().filter(|w| w.layer == Layer::DIMENSION)
    }

    /// Name of the signal holding the given pad, if any.
    pub fn signal_of_pad(&self, element: &str, pad: &str) -> Option<&str> {
        self.signals
            .iter()
            .find(|s| s.contactrefs.iter().any(|c| c.element == element && c.pad == pad))
            .map(|s| s.name.as_str())
    }
}

/// Any of the three document kinds, as detected from file content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Schematic(SchematicDoc),
    Board(BoardDoc),
    Library(LibraryDoc),
}

impl Document {
    pub fn kind(&self) -> DocumentKind {
        match self {
            Document::Schematic(_) => DocumentKind::Schematic,
            Document::Board(_) => DocumentKind::Board,
            Document::Library(_) => DocumentKind::Library,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DocumentKind {
    Schematic,
    Board,
    Library,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Schematic => "schematic",
            DocumentKind::Board => "board",
            DocumentKind::Library => "library",
        }
    }
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
