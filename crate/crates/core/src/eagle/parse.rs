use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use roxmltree::{Node, ParsingOptions};

use super::*;

type Result<T> = core::result::Result<T, ParseError>;

fn open(bytes: &[u8]) -> Result<roxmltree::Document<'_>> {
    let text = core::str::from_utf8(bytes)
        .map_err(|e| ParseError::MalformedXml(format!("invalid UTF-8: {e}")))?;
    let opts = ParsingOptions { allow_dtd: true, ..ParsingOptions::default() };
    roxmltree::Document::parse_with_options(text, opts)
        .map_err(|e| ParseError::MalformedXml(e.to_string()))
}

/// Returns the `<drawing>` element and the version string after checking it.
fn drawing<'a, 'i>(doc: &'a roxmltree::Document<'i>) -> Option<(Node<'a, 'i>, &'a str)> {
    let root = doc.root_element();
    if !root.has_tag_name("eagle") {
        return None;
    }
    let drawing = child(root, "drawing")?;
    Some((drawing, root.attribute("version").unwrap_or("")))
}

fn check_version(version: &str) -> Result<()> {
    if version.is_empty() {
        return Ok(());
    }
    let major = version.split('.').next().and_then(|m| m.parse::<u32>().ok());
    match major {
        Some(6..=9) => Ok(()),
        _ => Err(ParseError::UnsupportedVersion(version.into())),
    }
}

/// Parses any Eagle design file, dispatching on its content.
pub fn parse_document(bytes: &[u8]) -> Result<Document> {
    let doc = open(bytes)?;
    let (drawing, version) = drawing(&doc).ok_or(ParseError::NotAnEagleFile)?;
    check_version(version)?;
    if let Some(node) = child(drawing, "schematic") {
        return schematic(node, version).map(Document::Schematic);
    }
    if let Some(node) = child(drawing, "board") {
        return board(node, version).map(Document::Board);
    }
    if let Some(node) = child(drawing, "library") {
        return library(node, version, String::new()).map(Document::Library);
    }
    Err(ParseError::NotAnEagleFile)
}

pub fn parse_schematic(bytes: &[u8]) -> Result<SchematicDoc> {
    let doc = open(bytes)?;
    let (drawing, version) = drawing(&doc).ok_or(ParseError::NotASchematic)?;
    let node = child(drawing, "schematic").ok_or(ParseError::NotASchematic)?;
    check_version(version)?;
    schematic(node, version)
}

pub fn parse_board(bytes: &[u8]) -> Result<BoardDoc> {
    let doc = open(bytes)?;
    let (drawing, version) = drawing(&doc).ok_or(ParseError::NotABoard)?;
    let node = child(drawing, "board").ok_or(ParseError::NotABoard)?;
    check_version(version)?;
    board(node, version)
}

pub fn parse_library(bytes: &[u8]) -> Result<LibraryDoc> {
    let doc = open(bytes)?;
    let (drawing, version) = drawing(&doc).ok_or(ParseError::NotALibrary)?;
    let node = child(drawing, "library").ok_or(ParseError::NotALibrary)?;
    check_version(version)?;
    library(node, version, String::new())
}

// ---------------------------------------------------------------------------
// XML helpers

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(name))
}

fn children<'a, 'i: 'a>(node: Node<'a, 'i>, name: &'a str) -> impl Iterator<Item = Node<'a, 'i>> + 'a {
    node.children().filter(move |c| c.has_tag_name(name))
}

/// Children of `node/<container>/<name>`; empty when the container is absent.
fn nested<'a, 'i: 'a>(
    node: Node<'a, 'i>,
    container: &'a str,
    name: &'a str,
) -> impl Iterator<Item = Node<'a, 'i>> + 'a {
    child(node, container).into_iter().flat_map(move |c| children(c, name))
}

fn line(node: Node<'_, '_>) -> u32 {
    node.document().text_pos_at(node.range().start).row
}

fn attr<'a>(node: Node<'a, '_>, name: &'static str) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| ParseError::MissingAttribute {
        element: node.tag_name().name().into(),
        attribute: name,
        line: line(node),
    })
}

fn invalid(node: Node<'_, '_>, name: &'static str, value: &str) -> ParseError {
    ParseError::InvalidAttribute {
        element: node.tag_name().name().into(),
        attribute: name,
        value: value.into(),
        line: line(node),
    }
}

fn mm(node: Node<'_, '_>, name: &'static str) -> Result<Mm> {
    let text = attr(node, name)?;
    Mm::parse(text).map_err(|_| invalid(node, name, text))
}

fn mm_or_zero(node: Node<'_, '_>, name: &'static str) -> Result<Mm> {
    match node.attribute(name) {
        Some(text) => Mm::parse(text).map_err(|_| invalid(node, name, text)),
        None => Ok(Mm::ZERO),
    }
}

fn layer(node: Node<'_, '_>) -> Result<Layer> {
    let text = attr(node, "layer")?;
    text.parse::<u8>().map(Layer).map_err(|_| invalid(node, "layer", text))
}

fn rotation(node: Node<'_, '_>) -> Result<Rotation> {
    match node.attribute("rot") {
        Some(text) => Rotation::parse(text).ok_or_else(|| invalid(node, "rot", text)),
        None => Ok(Rotation::default()),
    }
}

fn yes(node: Node<'_, '_>, name: &str) -> bool {
    node.attribute(name) == Some("yes")
}

fn owned(node: Node<'_, '_>, name: &'static str) -> Result<String> {
    attr(node, name).map(ToOwned::to_owned)
}

fn text_item(node: Node<'_, '_>) -> Result<TextItem> {
    Ok(TextItem {
        content: node.text().unwrap_or("").into(),
        layer: layer(node)?,
        x: mm(node, "x")?,
        y: mm(node, "y")?,
    })
}

fn wire(node: Node<'_, '_>) -> Result<Wire> {
    Ok(Wire {
        x1: mm(node, "x1")?,
        y1: mm(node, "y1")?,
        x2: mm(node, "x2")?,
        y2: mm(node, "y2")?,
        width: mm_or_zero(node, "width")?,
        layer: layer(node)?,
        curve: node.attribute("curve").filter(|c| !c.is_empty() && *c != "0").map(Into::into),
    })
}

fn ensure_unique<'a>(kind: &'static str, names: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(ParseError::DuplicateName { kind, name: name.into() });
        }
    }
    Ok(())
}

fn broken(reference: impl Into<String>, context: impl Into<String>) -> ParseError {
    ParseError::BrokenReference { reference: reference.into(), context: context.into() }
}

// ---------------------------------------------------------------------------
// Libraries

fn library(node: Node<'_, '_>, version: &str, name: String) -> Result<LibraryDoc> {
    let name = node.attribute("name").map(Into::into).unwrap_or(name);
    let urn = node.attribute("urn").map(Into::into);

    let mut packages = Vec::new();
    for p in nested(node, "packages", "package") {
        let mut pkg = Package {
            name: owned(p, "name")?,
            smds: Vec::new(),
            pads: Vec::new(),
            texts: Vec::new(),
            wires: Vec::new(),
        };
        for c in p.children().filter(Node::is_element) {
            match c.tag_name().name() {
                "smd" => pkg.smds.push(Smd {
                    name: owned(c, "name")?,
                    x: mm(c, "x")?,
                    y: mm(c, "y")?,
                    dx: mm(c, "dx")?,
                    dy: mm(c, "dy")?,
                    layer: layer(c)?,
                }),
                "pad" => pkg.pads.push(ThruPad {
                    name: owned(c, "name")?,
                    x: mm(c, "x")?,
                    y: mm(c, "y")?,
                    drill: mm(c, "drill")?,
                }),
                "text" => pkg.texts.push(text_item(c)?),
                "wire" => pkg.wires.push(wire(c)?),
                _ => {}
            }
        }
        ensure_unique("pad", pkg.pad_names())?;
        packages.push(pkg);
    }
    ensure_unique("package", packages.iter().map(|p| p.name.as_str()))?;

    let mut symbols = Vec::new();
    for s in nested(node, "symbols", "symbol") {
        let mut pins = Vec::new();
        for p in children(s, "pin") {
            pins.push(Pin {
                name: owned(p, "name")?,
                x: mm(p, "x")?,
                y: mm(p, "y")?,
                direction: PinDirection::from_eagle(p.attribute("direction").unwrap_or("io")),
                visible: p.attribute("visible") != Some("off"),
            });
        }
        ensure_unique("pin", pins.iter().map(|p| p.name.as_str()))?;
        symbols.push(Symbol { name: owned(s, "name")?, pins });
    }
    ensure_unique("symbol", symbols.iter().map(|s| s.name.as_str()))?;

    let mut devicesets = Vec::new();
    for d in nested(node, "devicesets", "deviceset") {
        let ds_name = owned(d, "name")?;
        let mut gates = Vec::new();
        for g in nested(d, "gates", "gate") {
            let gate = Gate {
                name: owned(g, "name")?,
                symbol: owned(g, "symbol")?,
                x: mm_or_zero(g, "x")?,
                y: mm_or_zero(g, "y")?,
            };
            if !symbols.iter().any(|s| s.name == gate.symbol) {
                return Err(broken(
                    gate.symbol.clone(),
                    format!("gate {} of deviceset {ds_name} names a missing symbol", gate.name),
                ));
            }
            gates.push(gate);
        }
        ensure_unique("gate", gates.iter().map(|g| g.name.as_str()))?;

        let mut devices = Vec::new();
        for v in nested(d, "devices", "device") {
            let dev_name = v.attribute("name").unwrap_or("").to_owned();
            let package = v.attribute("package").filter(|p| !p.is_empty()).map(ToOwned::to_owned);
            let pkg = match &package {
                Some(p) => Some(packages.iter().find(|x| &x.name == p).ok_or_else(|| {
                    broken(p.clone(), format!("device {ds_name}/{dev_name} names a missing package"))
                })?),
                None => None,
            };
            let mut connects = Vec::new();
            for c in nested(v, "connects", "connect") {
                let gate_name = owned(c, "gate")?;
                let pin_name = owned(c, "pin")?;
                let pads: Vec<String> =
                    attr(c, "pad")?.split_whitespace().map(ToOwned::to_owned).collect();
                let ctx = || format!("connect in device {ds_name}/{dev_name}");
                let gate = gates
                    .iter()
                    .find(|g| g.name == gate_name)
                    .ok_or_else(|| broken(gate_name.clone(), ctx()))?;
                let symbol = symbols.iter().find(|s| s.name == gate.symbol).expect("checked above");
                if symbol.pin(&pin_name).is_none() {
                    return Err(broken(format!("{gate_name}.{pin_name}"), ctx()));
                }
                for pad in &pads {
                    if !pkg.is_some_and(|p| p.has_pad(pad)) {
                        return Err(broken(pad.clone(), format!("{}: pad not in package", ctx())));
                    }
                }
                connects.push(Connect { gate: gate_name, pin: pin_name, pads });
            }
            devices.push(Device { name: dev_name, package, connects });
        }
        ensure_unique("device", devices.iter().map(|d| d.name.as_str()))?;

        devicesets.push(DeviceSet {
            name: ds_name,
            prefix: d.attribute("prefix").unwrap_or("").into(),
            uservalue: yes(d, "uservalue"),
            gates,
            devices,
        });
    }
    ensure_unique("deviceset", devicesets.iter().map(|d| d.name.as_str()))?;

    Ok(LibraryDoc { version: version.into(), name, urn, packages, symbols, devicesets })
}

fn libraries(node: Node<'_, '_>, version: &str) -> Result<Vec<LibraryDoc>> {
    let libs = nested(node, "libraries", "library")
        .map(|l| library(l, version, String::new()))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    for lib in &libs {
        if !seen.insert((lib.name.as_str(), lib.urn.as_deref())) {
            return Err(ParseError::DuplicateName { kind: "library", name: lib.name.clone() });
        }
    }
    Ok(libs)
}

fn find_library(libs: &[LibraryDoc], name: &str, urn: Option<&str>) -> Option<usize> {
    libs.iter().position(|l| l.name == name && (urn.is_none() || l.urn.as_deref() == urn))
}

// ---------------------------------------------------------------------------
// Schematics

fn schematic(node: Node<'_, '_>, version: &str) -> Result<SchematicDoc> {
    let libraries = libraries(node, version)?;

    let mut parts = Vec::new();
    for p in nested(node, "parts", "part") {
        let name = owned(p, "name")?;
        if name.is_empty() {
            return Err(invalid(p, "name", ""));
        }
        let library = owned(p, "library")?;
        let library_urn = p.attribute("library_urn").map(ToOwned::to_owned);
        let deviceset = owned(p, "deviceset")?;
        let device = p.attribute("device").unwrap_or("").to_owned();
        let lib_index = find_library(&libraries, &library, library_urn.as_deref())
            .ok_or_else(|| broken(library.clone(), format!("part {name} names a missing library")))?;
        let ds = libraries[lib_index].deviceset(&deviceset).ok_or_else(|| {
            broken(format!("{library}/{deviceset}"), format!("part {name} names a missing deviceset"))
        })?;
        if ds.device(&device).is_none() {
            return Err(broken(
                format!("{library}/{deviceset}/{device}"),
                format!("part {name} names a missing device"),
            ));
        }
        let mut attributes = BTreeMap::new();
        for a in children(p, "attribute") {
            attributes.insert(owned(a, "name")?, a.attribute("value").unwrap_or("").to_owned());
        }
        parts.push(Part {
            name,
            library,
            library_urn,
            deviceset,
            device,
            value: p.attribute("value").map(ToOwned::to_owned),
            attributes,
            lib_index,
        });
    }
    ensure_unique("part", parts.iter().map(|p| p.name.as_str()))?;

    let doc = SchematicDoc { version: version.into(), libraries, parts, sheets: Vec::new() };
    let mut sheets = Vec::new();
    for s in nested(node, "sheets", "sheet") {
        sheets.push(sheet(&doc, s)?);
    }
    Ok(SchematicDoc { sheets, ..doc })
}

fn sheet(doc: &SchematicDoc, node: Node<'_, '_>) -> Result<Sheet> {
    let mut texts = Vec::new();
    let mut plain_wires = Vec::new();
    if let Some(plain) = child(node, "plain") {
        for c in plain.children().filter(Node::is_element) {
            match c.tag_name().name() {
                "text" => texts.push(text_item(c)?),
                "wire" => plain_wires.push(wire(c)?),
                _ => {}
            }
        }
    }

    let mut instances = Vec::new();
    for i in nested(node, "instances", "instance") {
        let part_name = owned(i, "part")?;
        let gate = owned(i, "gate")?;
        let part = doc
            .part(&part_name)
            .ok_or_else(|| broken(part_name.clone(), "instance names a missing part"))?;
        if doc.deviceset_of(part).gate(&gate).is_none() {
            return Err(broken(format!("{part_name}.{gate}"), "instance names a missing gate"));
        }
        instances.push(Instance { part: part_name, gate, x: mm(i, "x")?, y: mm(i, "y")?, rotation: rotation(i)? });
    }

    let mut nets = Vec::new();
    for n in nested(node, "nets", "net") {
        let name = owned(n, "name")?;
        let class = match n.attribute("class") {
            Some(c) => c.parse().map_err(|_| invalid(n, "class", c))?,
            None => 0,
        };
        let mut segments = Vec::new();
        for seg in children(n, "segment") {
            let mut segment = Segment { pinrefs: Vec::new(), labels: Vec::new(), wires: Vec::new() };
            for c in seg.children().filter(Node::is_element) {
                match c.tag_name().name() {
                    "pinref" => {
                        let pinref = PinRef { part: owned(c, "part")?, gate: owned(c, "gate")?, pin: owned(c, "pin")? };
                        if doc.part(&pinref.part).is_none() {
                            return Err(broken(pinref.part.clone(), format!("pinref in net {name} names a missing part")));
                        }
                        if doc.resolve_pin(&pinref.part, &pinref.gate, &pinref.pin).is_none() {
                            return Err(broken(
                                format!("{}.{}.{}", pinref.part, pinref.gate, pinref.pin),
                                format!("pinref in net {name} names a missing gate or pin"),
                            ));
                        }
                        segment.pinrefs.push(pinref);
                    }
                    "label" => segment.labels.push(Label { x: mm(c, "x")?, y: mm(c, "y")? }),
                    "wire" => segment.wires.push(wire(c)?),
                    _ => {}
                }
            }
            segments.push(segment);
        }
        nets.push(Net { name, class, segments });
    }

    Ok(Sheet { instances, nets, texts, plain_wires })
}

// ---------------------------------------------------------------------------
// Boards

fn via_extent(node: Node<'_, '_>) -> Result<(Layer, Layer)> {
    let text = attr(node, "extent")?;
    let (a, b) = text.split_once('-').ok_or_else(|| invalid(node, "extent", text))?;
    let a = a.parse::<u8>().map_err(|_| invalid(node, "extent", text))?;
    let b = b.parse::<u8>().map_err(|_| invalid(node, "extent", text))?;
    Ok((Layer(a), Layer(b)))
}

fn board(node: Node<'_, '_>, version: &str) -> Result<BoardDoc> {
    let libraries = libraries(node, version)?;

    let mut plain_wires = Vec::new();
    let mut plain_texts = Vec::new();
    if let Some(plain) = child(node, "plain") {
        for c in plain.children().filter(Node::is_element) {
            match c.tag_name().name() {
                "wire" => plain_wires.push(wire(c)?),
                "text" => plain_texts.push(text_item(c)?),
                _ => {}
            }
        }
    }

    let mut elements = Vec::new();
    for e in nested(node, "elements", "element") {
        let name = owned(e, "name")?;
        let library = owned(e, "library")?;
        let library_urn = e.attribute("library_urn").map(ToOwned::to_owned);
        let package = owned(e, "package")?;
        let lib_index = find_library(&libraries, &library, library_urn.as_deref())
            .ok_or_else(|| broken(library.clone(), format!("element {name} names a missing library")))?;
        if libraries[lib_index].package(&package).is_none() {
            return Err(broken(format!("{library}/{package}"), format!("element {name} names a missing package")));
        }
        let rotation = rotation(e)?;
        elements.push(Element {
            name,
            library,
            library_urn,
            package,
            value: e.attribute("value").unwrap_or("").into(),
            x: mm(e, "x")?,
            y: mm(e, "y")?,
            mirrored: rotation.mirrored,
            rotation,
            lib_index,
        });
    }
    ensure_unique("element", elements.iter().map(|e| e.name.as_str()))?;

    let mut signals = Vec::new();
    for s in nested(node, "signals", "signal") {
        let name = owned(s, "name")?;
        let mut signal = Signal { name, contactrefs: Vec::new(), wires: Vec::new(), vias: Vec::new() };
        for c in s.children().filter(Node::is_element) {
            match c.tag_name().name() {
                "contactref" => {
                    let element = owned(c, "element")?;
                    let pad = owned(c, "pad")?;
                    let ok = elements.iter().find(|e| e.name == element).is_some_and(|e| {
                        libraries[e.lib_index].package(&e.package).is_some_and(|p| p.has_pad(&pad))
                    });
                    if !ok {
                        return Err(broken(
                            format!("{element}:{pad}"),
                            format!("contactref in signal {} names a missing element or pad", signal.name),
                        ));
                    }
                    signal.contactrefs.push(ContactRef { element, pad });
                }
                "wire" => signal.wires.push(wire(c)?),
                "via" => signal.vias.push(Via {
                    x: mm(c, "x")?,
                    y: mm(c, "y")?,
                    extent: via_extent(c)?,
                    drill: mm(c, "drill")?,
                }),
                _ => {}
            }
        }
        signals.push(signal);
    }
    ensure_unique("signal", signals.iter().map(|s| s.name.as_str()))?;

    Ok(BoardDoc { version: version.into(), libraries, elements, signals, plain_wires, plain_texts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eagle::DocumentKind;
    use alloc::string::String;

    const BLINKY_SCH: &[u8] = include_bytes!("../../../../fixtures/blinky.sch");
    const BLINKY_BRD: &[u8] = include_bytes!("../../../../fixtures/blinky.brd");
    const RESISTOR_LBR: &[u8] = include_bytes!("../../../../fixtures/resistor.lbr");

    fn text(bytes: &[u8]) -> String {
        String::from_utf8(bytes.into()).unwrap()
    }

    const EMPTY_SCH: &str = r#"<?xml version="1.0" encoding="utf-8"?>
<!DOCTYPE eagle SYSTEM "eagle.dtd">
<eagle version="7.7.0"><drawing><layers/><schematic><libraries/><parts/><sheets><sheet><instances/><nets/></sheet></sheets></schematic></drawing></eagle>"#;

    const EMPTY_BRD: &str = r#"<?xml version="1.0" encoding="utf-8"?>
<eagle version="7.7.0"><drawing><board><plain/><libraries/><elements/><signals/></board></drawing></eagle>"#;

    #[test]
    fn empty_schematic() {
        let sch = parse_schematic(EMPTY_SCH.as_bytes()).unwrap();
        assert_eq!(sch.parts().len(), 0);
        assert_eq!(sch.sheets().len(), 1);
        assert_eq!(sch.version(), "7.7.0");
    }

    #[test]
    fn empty_board() {
        let brd = parse_board(EMPTY_BRD.as_bytes()).unwrap();
        assert!(brd.elements().is_empty());
        assert!(brd.signals().is_empty());
    }

    #[test]
    fn blinky_counts() {
        let sch = parse_schematic(BLINKY_SCH).unwrap();
        assert_eq!(sch.parts().len(), 5);
        assert_eq!(sch.sheets()[0].nets.len(), 5);
        let pinrefs: usize = sch.sheets()[0].nets.iter().map(|n| n.pinrefs().count()).sum();
        assert_eq!(pinrefs, 12);
        let d1 = sch.part("D1").unwrap();
        assert_eq!(d1.value.as_deref(), Some("RED"));
        assert_eq!(d1.attributes.get("COLOR").map(String::as_str), Some("red"));
        assert_eq!(sch.part("U1").unwrap().value, None);
        assert_eq!(sch.package_of(d1).unwrap().name, "LED0805");

        let brd = parse_board(BLINKY_BRD).unwrap();
        assert_eq!(brd.elements().len(), 5);
        assert_eq!(brd.signals().len(), 5);
        assert_eq!(brd.signals().iter().map(|s| s.contactrefs.len()).sum::<usize>(), 12);
        assert_eq!(brd.signal_of_pad("C1", "2"), Some("GND"));
        assert_eq!(brd.outline_wires().count(), 4);
    }

    #[test]
    fn standalone_library() {
        let lib = parse_library(RESISTOR_LBR).unwrap();
        let ds = lib.deviceset("RESISTOR").unwrap();
        assert_eq!(ds.prefix, "R");
        assert!(ds.uservalue);
        assert_eq!(lib.packages().len(), 2);
    }

    #[test]
    fn document_kind_is_detected() {
        assert_eq!(parse_document(BLINKY_SCH).unwrap().kind(), DocumentKind::Schematic);
        assert_eq!(parse_document(BLINKY_BRD).unwrap().kind(), DocumentKind::Board);
        assert_eq!(parse_document(RESISTOR_LBR).unwrap().kind(), DocumentKind::Library);
        assert!(matches!(parse_schematic(BLINKY_BRD), Err(ParseError::NotASchematic)));
        assert!(matches!(parse_board(BLINKY_SCH), Err(ParseError::NotABoard)));
    }

    #[test]
    fn pinref_to_missing_part() {
        let bad = text(BLINKY_SCH).replace(
            r#"<pinref part="R2" gate="G$1" pin="1"/>"#,
            r#"<pinref part="U9" gate="G$1" pin="1"/>"#,
        );
        match parse_schematic(bad.as_bytes()) {
            Err(ParseError::BrokenReference { reference, .. }) => assert_eq!(reference, "U9"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pinref_to_missing_pin() {
        let bad = text(BLINKY_SCH).replace(
            r#"<pinref part="R2" gate="G$1" pin="1"/>"#,
            r#"<pinref part="R2" gate="G$1" pin="3"/>"#,
        );
        match parse_schematic(bad.as_bytes()) {
            Err(ParseError::BrokenReference { reference, .. }) => assert_eq!(reference, "R2.G$1.3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contactref_to_missing_pad() {
        let brd = text(BLINKY_BRD);
        let needle = r#"<contactref element="R1" pad="1"/>"#;
        assert!(brd.contains(needle));
        let bad = brd.replace(needle, r#"<contactref element="R1" pad="3"/>"#);
        match parse_board(bad.as_bytes()) {
            Err(ParseError::BrokenReference { reference, .. }) => assert_eq!(reference, "R1:3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn connect_to_missing_pad() {
        let lib = text(RESISTOR_LBR);
        let needle = r#"pad="2"/>"#;
        assert!(lib.contains(needle));
        let bad = lib.replacen(needle, r#"pad="4"/>"#, 1);
        match parse_library(bad.as_bytes()) {
            Err(ParseError::BrokenReference { reference, .. }) => assert!(reference.contains('4'), "{reference}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_and_foreign_input() {
        assert!(matches!(parse_document(b"<eagle><drawing>"), Err(ParseError::MalformedXml(_))));
        assert!(matches!(parse_document(b"<svg/>"), Err(ParseError::NotAnEagleFile)));
        let v5 = EMPTY_SCH.replace("7.7.0", "5.11.0");
        assert!(matches!(parse_schematic(v5.as_bytes()), Err(ParseError::UnsupportedVersion(_))));
    }

    #[test]
    fn duplicate_part_names() {
        let bad = text(BLINKY_SCH).replace(r#"<part name="R2""#, r#"<part name="R1""#);
        assert!(matches!(parse_schematic(bad.as_bytes()), Err(ParseError::DuplicateName { .. })));
    }

    #[test]
    fn bad_coordinate() {
        let bad = text(BLINKY_SCH).replace(r#"x="78.74""#, r#"x="7e1""#);
        assert!(matches!(parse_schematic(bad.as_bytes()), Err(ParseError::InvalidAttribute { .. })));
    }

    #[test]
    fn parsing_is_deterministic() {
        assert_eq!(parse_schematic(BLINKY_SCH).unwrap(), parse_schematic(BLINKY_SCH).unwrap());
        assert_eq!(parse_board(BLINKY_BRD).unwrap(), parse_board(BLINKY_BRD).unwrap());
    }
}
