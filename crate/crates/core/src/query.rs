//! Fluent selectors over parsed documents.
//!
//! ```
//! # let sch = pcblint_core::parse_schematic(include_bytes!("../../../fixtures/blinky.sch")).unwrap();
//! use pcblint_core::query::from;
//!
//! let literal_names = from(&sch)
//!     .packages()?
//!     .texts()?
//!     .with_layer("tNames")?
//!     .without_text(">NAME")?
//!     .count();
//! assert_eq!(literal_names, 0);
//! # Ok::<(), pcblint_core::query::QueryError>(())
//! ```
//!
//! Every step keeps document order. A step applied to a kind it does not
//! support fails with [`QueryError::KindMismatch`] instead of yielding an
//! empty selection.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::eagle::{
    BoardDoc, Element, Instance, LibraryDoc, Net, Package, Part, Pin, PinRef, SchematicDoc, Sheet,
    Signal, TextItem,
};
use crate::glob::glob_match;
use crate::layers::Layer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Document,
    Sheet,
    Part,
    Instance,
    Net,
    Text,
    Pin,
    Package,
    Element,
    Signal,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Document => "document",
            Kind::Sheet => "sheet",
            Kind::Part => "part",
            Kind::Instance => "instance",
            Kind::Net => "net",
            Kind::Text => "text",
            Kind::Pin => "pin",
            Kind::Package => "package",
            Kind::Element => "element",
            Kind::Signal => "signal",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("{step}() is not defined on a selection of {kind}s")]
    KindMismatch { step: &'static str, kind: Kind },
    #[error("unknown layer {0:?}")]
    UnknownLayer(String),
}

type Result<T> = core::result::Result<T, QueryError>;

/// The document a query starts from.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    Schematic(&'a SchematicDoc),
    Board(&'a BoardDoc),
    Library(&'a LibraryDoc),
}

impl<'a> From<&'a SchematicDoc> for Source<'a> {
    fn from(d: &'a SchematicDoc) -> Self {
        Source::Schematic(d)
    }
}

impl<'a> From<&'a BoardDoc> for Source<'a> {
    fn from(d: &'a BoardDoc) -> Self {
        Source::Board(d)
    }
}

impl<'a> From<&'a LibraryDoc> for Source<'a> {
    fn from(d: &'a LibraryDoc) -> Self {
        Source::Library(d)
    }
}

/// Where a text item lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextOwner<'a> {
    Sheet(usize),
    /// `library` is `None` for packages of a standalone library file.
    Package { library: Option<&'a str>, package: &'a str },
}

/// How a pin was reached: through a net's pinref, or from a part's symbol.
#[derive(Debug, Clone, Copy)]
pub enum PinVia<'a> {
    PinRef { sheet: usize, net: &'a str, pinref: &'a PinRef },
    Symbol,
}

#[derive(Debug, Clone, Copy)]
pub struct PinItem<'a> {
    pub part: &'a str,
    pub gate: &'a str,
    pub pin: &'a Pin,
    pub via: PinVia<'a>,
}

/// One selected design object.
#[derive(Debug, Clone, Copy)]
pub enum Item<'a> {
    Document(Source<'a>),
    Sheet { index: usize, sheet: &'a Sheet },
    Part(&'a Part),
    Instance { sheet: usize, instance: &'a Instance },
    Net { sheet: usize, net: &'a Net },
    Text { owner: TextOwner<'a>, index: usize, text: &'a TextItem },
    Pin(PinItem<'a>),
    Package { library: Option<&'a str>, package: &'a Package },
    Element(&'a Element),
    Signal(&'a Signal),
}

fn package_prefix(library: Option<&str>, package: &str) -> String {
    match library {
        Some(lib) => format!("library:{lib}/package:{package}"),
        None => format!("package:{package}"),
    }
}

impl<'a> Item<'a> {
    pub fn kind(&self) -> Kind {
        match self {
            Item::Document(_) => Kind::Document,
            Item::Sheet { .. } => Kind::Sheet,
            Item::Part(_) => Kind::Part,
            Item::Instance { .. } => Kind::Instance,
            Item::Net { .. } => Kind::Net,
            Item::Text { .. } => Kind::Text,
            Item::Pin(_) => Kind::Pin,
            Item::Package { .. } => Kind::Package,
            Item::Element(_) => Kind::Element,
            Item::Signal(_) => Kind::Signal,
        }
    }

    /// Stable path naming this object, e.g. `part:R1` or
    /// `sheet:0/net:N$1/pinref:U1.G$1.PB5`. Indices are zero-based.
    pub fn locator(&self) -> String {
        match self {
            Item::Document(Source::Schematic(_)) => "schematic".into(),
            Item::Document(Source::Board(_)) => "board".into(),
            Item::Document(Source::Library(_)) => "library".into(),
            Item::Sheet { index, .. } => format!("sheet:{index}"),
            Item::Part(p) => format!("part:{}", p.name),
            Item::Instance { sheet, instance } => {
                format!("sheet:{sheet}/instance:{}.{}", instance.part, instance.gate)
            }
            Item::Net { sheet, net } => format!("sheet:{sheet}/net:{}", net.name),
            Item::Text { owner: TextOwner::Sheet(s), index, .. } => format!("sheet:{s}/text:{index}"),
            Item::Text { owner: TextOwner::Package { library, package }, index, .. } => {
                format!("{}/text:{index}", package_prefix(*library, package))
            }
            Item::Pin(PinItem { part, gate, pin, via: PinVia::PinRef { sheet, net, .. } }) => {
                format!("sheet:{sheet}/net:{net}/pinref:{part}.{gate}.{}", pin.name)
            }
            Item::Pin(PinItem { part, gate, pin, via: PinVia::Symbol }) => {
                format!("part:{part}/pin:{gate}.{}", pin.name)
            }
            Item::Package { library, package } => package_prefix(*library, &package.name),
            Item::Element(e) => format!("element:{}", e.name),
            Item::Signal(s) => format!("signal:{}", s.name),
        }
    }

    fn name(&self) -> Option<&'a str> {
        match *self {
            Item::Part(p) => Some(&p.name),
            Item::Instance { instance, .. } => Some(&instance.part),
            Item::Net { net, .. } => Some(&net.name),
            Item::Pin(p) => Some(&p.pin.name),
            Item::Package { package, .. } => Some(&package.name),
            Item::Element(e) => Some(&e.name),
            Item::Signal(s) => Some(&s.name),
            _ => None,
        }
    }
}

/// Anything that names a layer: a number, a [`Layer`], or a standard name.
pub trait LayerSpec {
    fn resolve(&self) -> Result<Layer>;
}

impl LayerSpec for u8 {
    fn resolve(&self) -> Result<Layer> {
        Ok(Layer(*self))
    }
}

impl LayerSpec for Layer {
    fn resolve(&self) -> Result<Layer> {
        Ok(*self)
    }
}

impl LayerSpec for &str {
    fn resolve(&self) -> Result<Layer> {
        Layer::from_name(self).ok_or_else(|| QueryError::UnknownLayer((*self).into()))
    }
}

/// An ordered, homogeneous selection of design objects.
#[derive(Debug, Clone)]
pub struct Selection<'a> {
    source: Source<'a>,
    kind: Kind,
    items: Vec<Item<'a>>,
}

/// Starts a query at the document root.
pub fn from<'a>(doc: impl Into<Source<'a>>) -> Selection<'a> {
    let source = doc.into();
    Selection { source, kind: Kind::Document, items: alloc::vec![Item::Document(source)] }
}

impl<'a> Selection<'a> {
    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn source(&self) -> Source<'a> {
        self.source
    }

    fn mismatch<T>(&self, step: &'static str) -> Result<T> {
        Err(QueryError::KindMismatch { step, kind: self.kind })
    }

    fn expect(&self, step: &'static str, kinds: &[Kind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            self.mismatch(step)
        }
    }

    fn flat_map(self, kind: Kind, f: impl Fn(&Item<'a>, &mut Vec<Item<'a>>)) -> Selection<'a> {
        let mut items = Vec::new();
        for item in &self.items {
            f(item, &mut items);
        }
        Selection { source: self.source, kind, items }
    }

    fn schematic(&self) -> Option<&'a SchematicDoc> {
        match self.source {
            Source::Schematic(s) => Some(s),
            _ => None,
        }
    }

    // --- navigation -------------------------------------------------------

    pub fn sheets(self) -> Result<Selection<'a>> {
        let Some(sch) = self.schematic().filter(|_| self.kind == Kind::Document) else {
            return self.mismatch("sheets");
        };
        Ok(self.flat_map(Kind::Sheet, |_, out| {
            out.extend(sch.sheets().iter().enumerate().map(|(index, sheet)| Item::Sheet { index, sheet }));
        }))
    }

    pub fn parts(self) -> Result<Selection<'a>> {
        let Some(sch) = self.schematic().filter(|_| self.kind == Kind::Document) else {
            return self.mismatch("parts");
        };
        Ok(self.flat_map(Kind::Part, |_, out| out.extend(sch.parts().iter().map(Item::Part))))
    }

    pub fn instances(self) -> Result<Selection<'a>> {
        self.expect("instances", &[Kind::Sheet])?;
        Ok(self.flat_map(Kind::Instance, |item, out| {
            if let Item::Sheet { index, sheet } = *item {
                out.extend(sheet.instances.iter().map(|instance| Item::Instance { sheet: index, instance }));
            }
        }))
    }

    pub fn nets(self) -> Result<Selection<'a>> {
        self.expect("nets", &[Kind::Sheet])?;
        Ok(self.flat_map(Kind::Net, |item, out| {
            if let Item::Sheet { index, sheet } = *item {
                out.extend(sheet.nets.iter().map(|net| Item::Net { sheet: index, net }));
            }
        }))
    }

    pub fn texts(self) -> Result<Selection<'a>> {
        self.expect("texts", &[Kind::Sheet, Kind::Package])?;
        Ok(self.flat_map(Kind::Text, |item, out| match *item {
            Item::Sheet { index, sheet } => out.extend(
                sheet
                    .texts
                    .iter()
                    .enumerate()
                    .map(|(i, text)| Item::Text { owner: TextOwner::Sheet(index), index: i, text }),
            ),
            Item::Package { library, package } => {
                let owner = TextOwner::Package { library, package: &package.name };
                out.extend(package.texts.iter().enumerate().map(|(index, text)| Item::Text { owner, index, text }));
            }
            _ => {}
        }))
    }

    /// Pins of nets (their pinrefs), of parts (all symbol pins of every
    /// gate), or of instances (the placed gate's symbol pins).
    pub fn pins(self) -> Result<Selection<'a>> {
        self.expect("pins", &[Kind::Net, Kind::Part, Kind::Instance])?;
        let sch = self.schematic().expect("nets, parts and instances come from schematics");
        Ok(self.flat_map(Kind::Pin, |item, out| match *item {
            Item::Net { sheet, net } => {
                for pinref in net.pinrefs() {
                    if let Some(pin) = sch.resolve_pin(&pinref.part, &pinref.gate, &pinref.pin) {
                        out.push(Item::Pin(PinItem {
                            part: &pinref.part,
                            gate: &pinref.gate,
                            pin,
                            via: PinVia::PinRef { sheet, net: &net.name, pinref },
                        }));
                    }
                }
            }
            Item::Part(part) => {
                for (gate, pin) in sch.gate_pins(part) {
                    out.push(Item::Pin(PinItem { part: &part.name, gate: &gate.name, pin, via: PinVia::Symbol }));
                }
            }
            Item::Instance { instance, .. } => {
                let symbol = sch.part(&instance.part).and_then(|p| sch.symbol_of(p, &instance.gate));
                for pin in symbol.into_iter().flat_map(|s| s.pins.iter()) {
                    out.push(Item::Pin(PinItem {
                        part: &instance.part,
                        gate: &instance.gate,
                        pin,
                        via: PinVia::Symbol,
                    }));
                }
            }
            _ => {}
        }))
    }

    /// Packages of the document's libraries (embedded ones for schematics
    /// and boards).
    pub fn packages(self) -> Result<Selection<'a>> {
        self.expect("packages", &[Kind::Document])?;
        Ok(self.flat_map(Kind::Package, |item, out| {
            let (libs, embedded): (&'a [LibraryDoc], bool) = match *item {
                Item::Document(Source::Schematic(s)) => (s.libraries(), true),
                Item::Document(Source::Board(b)) => (b.libraries(), true),
                Item::Document(Source::Library(l)) => (core::slice::from_ref(l), false),
                _ => return,
            };
            for lib in libs {
                let library = embedded.then_some(lib.name());
                out.extend(lib.packages().iter().map(|package| Item::Package { library, package }));
            }
        }))
    }

    pub fn elements(self) -> Result<Selection<'a>> {
        let Source::Board(brd) = self.source else { return self.mismatch("elements") };
        self.expect("elements", &[Kind::Document])?;
        Ok(self.flat_map(Kind::Element, |_, out| out.extend(brd.elements().iter().map(Item::Element))))
    }

    pub fn signals(self) -> Result<Selection<'a>> {
        let Source::Board(brd) = self.source else { return self.mismatch("signals") };
        self.expect("signals", &[Kind::Document])?;
        Ok(self.flat_map(Kind::Signal, |_, out| out.extend(brd.signals().iter().map(Item::Signal))))
    }

    // --- filters ----------------------------------------------------------

    fn retain(mut self, keep: impl Fn(&Item<'a>) -> bool) -> Selection<'a> {
        self.items.retain(|i| keep(i));
        self
    }

    pub fn with_layer(self, layer: impl LayerSpec) -> Result<Selection<'a>> {
        self.expect("with_layer", &[Kind::Text])?;
        let layer = layer.resolve()?;
        Ok(self.retain(|i| matches!(i, Item::Text { text, .. } if text.layer == layer)))
    }

    /// Keeps text items whose content is not exactly `content`.
    pub fn without_text(self, content: &str) -> Result<Selection<'a>> {
        self.expect("without_text", &[Kind::Text])?;
        Ok(self.retain(|i| matches!(i, Item::Text { text, .. } if text.content != content)))
    }

    /// Keeps text items whose content is exactly `content`.
    pub fn with_text(self, content: &str) -> Result<Selection<'a>> {
        self.expect("with_text", &[Kind::Text])?;
        Ok(self.retain(|i| matches!(i, Item::Text { text, .. } if text.content == content)))
    }

    pub fn with_name(self, glob: &str) -> Result<Selection<'a>> {
        self.expect(
            "with_name",
            &[Kind::Part, Kind::Instance, Kind::Net, Kind::Pin, Kind::Package, Kind::Element, Kind::Signal],
        )?;
        Ok(self.retain(|i| i.name().is_some_and(|n| glob_match(glob, n))))
    }

    /// Parts or elements whose value matches; a missing value matches as "".
    pub fn with_value(self, glob: &str) -> Result<Selection<'a>> {
        self.expect("with_value", &[Kind::Part, Kind::Element])?;
        Ok(self.retain(|i| match i {
            Item::Part(p) => glob_match(glob, p.value.as_deref().unwrap_or("")),
            Item::Element(e) => glob_match(glob, &e.value),
            _ => false,
        }))
    }

    pub fn with_deviceset(self, glob: &str) -> Result<Selection<'a>> {
        self.expect("with_deviceset", &[Kind::Part, Kind::Instance])?;
        let sch = self.schematic();
        Ok(self.retain(|i| match i {
            Item::Part(p) => glob_match(glob, &p.deviceset),
            Item::Instance { instance, .. } => sch
                .and_then(|s| s.part(&instance.part))
                .is_some_and(|p| glob_match(glob, &p.deviceset)),
            _ => false,
        }))
    }

    pub fn with_attribute(self, name: &str, glob: &str) -> Result<Selection<'a>> {
        self.expect("with_attribute", &[Kind::Part])?;
        Ok(self.retain(|i| match i {
            Item::Part(p) => p.attributes.get(name).is_some_and(|v| glob_match(glob, v)),
            _ => false,
        }))
    }

    /// Keeps items satisfying an arbitrary predicate.
    pub fn matching(self, predicate: impl Fn(&Item<'a>) -> bool) -> Selection<'a> {
        self.retain(predicate)
    }

    // --- terminals --------------------------------------------------------

    pub fn count(&self) -> usize {
        self.items.len()
    }

    pub fn first(&self) -> Option<Item<'a>> {
        self.items.first().copied()
    }

    pub fn collect(self) -> Vec<Item<'a>> {
        self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = &Item<'a>> {
        self.items.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eagle::{parse_board, parse_library, parse_schematic};
    use proptest::prelude::*;

    const SCH: &str = include_str!("../../../fixtures/blinky.sch");
    const BRD: &[u8] = include_bytes!("../../../fixtures/blinky.brd");
    const LBR: &[u8] = include_bytes!("../../../fixtures/resistor.lbr");

    fn sch() -> SchematicDoc {
        parse_schematic(SCH.as_bytes()).unwrap()
    }

    fn locators(sel: &Selection<'_>) -> Vec<String> {
        sel.iter().map(Item::locator).collect()
    }

    #[test]
    fn navigation_counts() {
        let sch = sch();
        assert_eq!(from(&sch).count(), 1);
        assert_eq!(from(&sch).parts().unwrap().count(), 5);
        assert_eq!(from(&sch).sheets().unwrap().nets().unwrap().count(), 5);
        assert_eq!(from(&sch).sheets().unwrap().nets().unwrap().pins().unwrap().count(), 12);
        assert_eq!(from(&sch).parts().unwrap().with_name("U1").unwrap().pins().unwrap().count(), 5);
        assert_eq!(from(&sch).packages().unwrap().count(), 4);
    }

    #[test]
    fn wrong_kind_is_an_error() {
        let sch = sch();
        assert_eq!(
            from(&sch).texts().unwrap_err(),
            QueryError::KindMismatch { step: "texts", kind: Kind::Document }
        );
        assert!(from(&sch).parts().unwrap().with_layer(25).is_err());
        let brd = parse_board(BRD).unwrap();
        assert!(from(&brd).parts().is_err());
    }

    #[test]
    fn library_texts() {
        let lib = parse_library(LBR).unwrap();
        let texts = from(&lib).packages().unwrap().texts().unwrap();
        assert_eq!(texts.count(), 4);
        assert_eq!(texts.clone().with_layer("tNames").unwrap().count(), 2);
        assert_eq!(texts.with_layer(25).unwrap().without_text(">NAME").unwrap().count(), 0);
    }

    #[test]
    fn literal_name_is_found() {
        let bad = SCH.replacen(">&gt;NAME<", ">U1<", 1);
        let sch = parse_schematic(bad.as_bytes()).unwrap();
        let hits = from(&sch)
            .packages()
            .and_then(|s| s.texts())
            .and_then(|s| s.with_layer("tNames"))
            .and_then(|s| s.without_text(">NAME"))
            .unwrap();
        assert_eq!(hits.count(), 1);
        assert!(hits.first().unwrap().locator().starts_with("library:mcu/package:SOIC8/text:"));
    }

    #[test]
    fn filters() {
        let sch = sch();
        let parts = from(&sch).parts().unwrap();
        assert_eq!(parts.clone().with_deviceset("RESISTOR*").unwrap().count(), 2);
        assert_eq!(parts.clone().with_value("1*").unwrap().count(), 2);
        assert_eq!(parts.clone().with_attribute("COLOR", "red").unwrap().count(), 1);
        assert_eq!(locators(&parts.clone().with_name("?1").unwrap()), ["part:U1", "part:R1", "part:D1", "part:C1"]);
        assert_eq!(parts.matching(|i| i.locator().ends_with('2')).count(), 1);
        assert!(matches!(from(&sch).sheets().unwrap().texts().unwrap().with_layer("Nope"), Err(QueryError::UnknownLayer(_))));
    }

    #[test]
    fn locators_of_each_kind() {
        let sch = sch();
        let first = |s: Selection<'_>| s.first().unwrap().locator();
        assert_eq!(first(from(&sch).sheets().unwrap()), "sheet:0");
        assert_eq!(first(from(&sch).sheets().unwrap().instances().unwrap()), "sheet:0/instance:U1.G$1");
        assert_eq!(first(from(&sch).sheets().unwrap().texts().unwrap()), "sheet:0/text:0");
        assert_eq!(
            first(from(&sch).sheets().unwrap().nets().unwrap().pins().unwrap()),
            "sheet:0/net:N$1/pinref:U1.G$1.PB5"
        );
        assert_eq!(first(from(&sch).parts().unwrap().with_name("C1").unwrap().pins().unwrap()), "part:C1/pin:G$1.1");
        let brd = parse_board(BRD).unwrap();
        assert_eq!(first(from(&brd).elements().unwrap()), "element:U1");
        assert_eq!(first(from(&brd).signals().unwrap()), "signal:N$1");
        let lib = parse_library(LBR).unwrap();
        assert_eq!(first(from(&lib).packages().unwrap()), "package:R0805");
    }

    #[test]
    fn empty_selections() {
        let brd = parse_board(
            br#"<eagle version="7.7.0"><drawing><board><plain/><libraries/><elements/><signals/></board></drawing></eagle>"#,
        )
        .unwrap();
        let elements = from(&brd).elements().unwrap();
        assert_eq!(elements.count(), 0);
        assert!(elements.first().is_none());
        assert_eq!(elements.with_name("*").unwrap().count(), 0);
    }

    proptest! {
        #[test]
        fn filters_are_idempotent_and_commute(a in "[A-Z1-9?*]{1,3}", b in "[0-9a-z?*]{1,3}") {
            let sch = sch();
            let parts = from(&sch).parts().unwrap();
            let once = parts.clone().with_name(&a).unwrap();
            let twice = once.clone().with_name(&a).unwrap();
            prop_assert_eq!(locators(&once), locators(&twice));
            let ab = parts.clone().with_name(&a).unwrap().with_value(&b).unwrap();
            let ba = parts.with_value(&b).unwrap().with_name(&a).unwrap();
            prop_assert_eq!(locators(&ab), locators(&ba));
            prop_assert_eq!(ab.count(), ab.clone().collect().len());
            prop_assert!(ab.iter().all(|i| i.kind() == Kind::Part));
        }
    }
}
