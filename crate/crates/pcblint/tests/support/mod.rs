//! Random schematics and brute-force reference implementations.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// `(part, gate, pin)`.
pub type RawPin = (String, String, String);

#[derive(Debug, Clone)]
pub struct RawPart {
    pub name: String,
    /// `DUO` has gates G1 and G2, `SOLO` only G1. Each gate has pins P1..P3.
    pub deviceset: &'static str,
    pub value: Option<&'static str>,
    /// Gates placed as instances, with their sheet.
    pub placed: Vec<(String, usize)>,
}

#[derive(Debug, Clone)]
pub struct RawNet {
    pub sheet: usize,
    pub name: String,
    pub segments: Vec<Vec<RawPin>>,
}

#[derive(Debug, Clone)]
pub struct RawSchematic {
    pub parts: Vec<RawPart>,
    pub sheets: usize,
    pub nets: Vec<RawNet>,
}

pub const PINS: [&str; 3] = ["P1", "P2", "P3"];

pub fn gates_of(deviceset: &str) -> &'static [&'static str] {
    if deviceset == "DUO" {
        &["G1", "G2"]
    } else {
        &["G1"]
    }
}

const LIBRARY: &str = r#"<library name="gen">
<packages>
<package name="PK6"><pad name="1" x="0" y="0" drill="0.8"/><pad name="2" x="2.54" y="0" drill="0.8"/><pad name="3" x="5.08" y="0" drill="0.8"/><pad name="4" x="7.62" y="0" drill="0.8"/><pad name="5" x="10.16" y="0" drill="0.8"/><pad name="6" x="12.7" y="0" drill="0.8"/></package>
<package name="PK3"><pad name="1" x="0" y="0" drill="0.8"/><pad name="2" x="2.54" y="0" drill="0.8"/><pad name="3" x="5.08" y="0" drill="0.8"/></package>
</packages>
<symbols>
<symbol name="S3"><pin name="P1" x="0" y="0" direction="pas"/><pin name="P2" x="0" y="2.54" direction="pas"/><pin name="P3" x="0" y="5.08" direction="pas"/></symbol>
</symbols>
<devicesets>
<deviceset name="DUO" prefix="X"><gates><gate name="G1" symbol="S3" x="0" y="0"/><gate name="G2" symbol="S3" x="10.16" y="0"/></gates>
<devices><device name="" package="PK6"><connects>
<connect gate="G1" pin="P1" pad="1"/><connect gate="G1" pin="P2" pad="2"/><connect gate="G1" pin="P3" pad="3"/>
<connect gate="G2" pin="P1" pad="4"/><connect gate="G2" pin="P2" pad="5"/><connect gate="G2" pin="P3" pad="6"/>
</connects></device></devices></deviceset>
<deviceset name="SOLO" prefix="X" uservalue="yes"><gates><gate name="G1" symbol="S3" x="0" y="0"/></gates>
<devices><device name="" package="PK3"><connects>
<connect gate="G1" pin="P1" pad="1"/><connect gate="G1" pin="P2" pad="2"/><connect gate="G1" pin="P3" pad="3"/>
</connects></device></devices></deviceset>
</devicesets>
</library>"#;

impl RawSchematic {
    pub fn to_xml(&self) -> String {
        let mut x = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<!DOCTYPE eagle SYSTEM \"eagle.dtd\">\n");
        x.push_str("<eagle version=\"7.7.0\"><drawing><schematic><libraries>\n");
        x.push_str(LIBRARY);
        x.push_str("\n</libraries><parts>\n");
        for p in &self.parts {
            let value = p.value.map(|v| format!(" value=\"{v}\"")).unwrap_or_default();
            let _ = writeln!(x, "<part name=\"{}\" library=\"gen\" deviceset=\"{}\" device=\"\"{value}/>", p.name, p.deviceset);
        }
        x.push_str("</parts><sheets>\n");
        for s in 0..self.sheets {
            x.push_str("<sheet><instances>\n");
            for p in &self.parts {
                for (g, sheet) in &p.placed {
                    if *sheet == s {
                        let _ = writeln!(x, "<instance part=\"{}\" gate=\"{g}\" x=\"0\" y=\"0\"/>", p.name);
                    }
                }
            }
            x.push_str("</instances><nets>\n");
            for n in self.nets.iter().filter(|n| n.sheet == s) {
                let _ = writeln!(x, "<net name=\"{}\" class=\"0\">", n.name);
                for seg in &n.segments {
                    x.push_str("<segment>");
                    for (p, g, pin) in seg {
                        let _ = write!(x, "<pinref part=\"{p}\" gate=\"{g}\" pin=\"{pin}\"/>");
                    }
                    x.push_str("<wire x1=\"0\" y1=\"0\" x2=\"2.54\" y2=\"0\" width=\"0.1524\" layer=\"91\"/></segment>\n");
                }
                x.push_str("</net>\n");
            }
            x.push_str("</nets></sheet>\n");
        }
        x.push_str("</sheets></schematic></drawing></eagle>\n");
        x
    }

    pub fn pinrefs(&self) -> impl Iterator<Item = (&str, &RawPin)> {
        self.nets.iter().flat_map(|n| n.segments.iter().flatten().map(move |p| (n.name.as_str(), p)))
    }

    pub fn placed_pins(&self) -> BTreeSet<RawPin> {
        let mut out = BTreeSet::new();
        for p in &self.parts {
            for (g, _) in &p.placed {
                for pin in PINS {
                    out.insert((p.name.clone(), g.clone(), pin.to_string()));
                }
            }
        }
        out
    }
}

/// Up to `max_parts` parts, `max_nets` net names and `max_sheets` sheets.
pub fn raw_schematic(max_parts: usize, max_nets: usize, max_sheets: usize) -> impl Strategy<Value = RawSchematic> {
    let part = (
        prop_oneof![Just("DUO"), Just("SOLO")],
        prop_oneof![Just(None), Just(Some("1k")), Just(Some("10k"))],
        proptest::collection::vec((any::<bool>(), 0..max_sheets), 2),
    );
    (1..=max_sheets, proptest::collection::vec(part, 1..=max_parts), 1..=max_nets)
        .prop_flat_map(move |(sheets, parts, nnets)| {
            let nparts = parts.len();
            let pinref = (0..nparts, 0..2usize, 0..3usize);
            let segment = proptest::collection::vec(pinref, 0..5);
            let net = (0..sheets, 0..nnets, proptest::collection::vec(segment, 1..3));
            (Just(sheets), Just(parts), proptest::collection::vec(net, 0..=max_nets + 2))
        })
        .prop_map(|(sheets, parts, nets)| {
            let parts: Vec<RawPart> = parts
                .into_iter()
                .enumerate()
                .map(|(i, (ds, value, placement))| {
                    let placed = gates_of(ds)
                        .iter()
                        .zip(placement)
                        .filter(|(_, (on, _))| *on)
                        .map(|(g, (_, s))| (g.to_string(), s % sheets))
                        .collect();
                    RawPart { name: format!("X{}", i + 1), deviceset: ds, value, placed }
                })
                .collect();
            let mut seen = BTreeSet::new();
            let nets = nets
                .into_iter()
                .filter(|(sheet, name, _)| seen.insert((*sheet, *name)))
                .map(|(sheet, name, segs)| RawNet {
                    sheet,
                    name: format!("N{name}"),
                    segments: segs
                        .into_iter()
                        .map(|seg| {
                            seg.into_iter()
                                .map(|(pi, gi, pin)| {
                                    let p = &parts[pi];
                                    let gates = gates_of(p.deviceset);
                                    (p.name.clone(), gates[gi % gates.len()].to_string(), PINS[pin].to_string())
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect();
            RawSchematic { parts, sheets, nets }
        })
}

/// Plain union-find over string-keyed nodes.
pub struct UnionFind {
    parent: BTreeMap<String, String>,
}

impl UnionFind {
    pub fn new() -> Self {
        UnionFind { parent: BTreeMap::new() }
    }

    pub fn add(&mut self, x: &str) {
        self.parent.entry(x.to_string()).or_insert_with(|| x.to_string());
    }

    pub fn find(&mut self, x: &str) -> String {
        let p = self.parent[x].clone();
        if p == x {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(x.to_string(), root.clone());
        root
    }

    pub fn union(&mut self, a: &str, b: &str) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(ra, rb);
        }
    }

    pub fn keys(&self) -> Vec<String> {
        self.parent.keys().cloned().collect()
    }
}

/// One electrical net as the oracle sees it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleNet {
    pub names: BTreeSet<String>,
    pub pins: BTreeSet<RawPin>,
}

impl OracleNet {
    pub fn canonical(&self) -> &str {
        self.names.iter().next().unwrap()
    }
}

/// Nets from raw pinref tuples: net names and pins are nodes; every pinref
/// joins its net name with its pin.
pub fn oracle_nets(raw: &RawSchematic) -> BTreeSet<OracleNet> {
    let mut uf = UnionFind::new();
    let net_key = |n: &str| format!("net\u{0}{n}");
    let pin_key = |p: &RawPin| format!("pin\u{0}{}\u{0}{}\u{0}{}", p.0, p.1, p.2);
    for n in &raw.nets {
        uf.add(&net_key(&n.name));
    }
    for (net, pin) in raw.pinrefs() {
        uf.add(&pin_key(pin));
        uf.union(&net_key(net), &pin_key(pin));
    }
    let mut groups: BTreeMap<String, OracleNet> = BTreeMap::new();
    for n in &raw.nets {
        let root = uf.find(&net_key(&n.name));
        groups
            .entry(root)
            .or_insert_with(|| OracleNet { names: BTreeSet::new(), pins: BTreeSet::new() })
            .names
            .insert(n.name.clone());
    }
    for (_, pin) in raw.pinrefs() {
        let root = uf.find(&pin_key(pin));
        groups.get_mut(&root).unwrap().pins.insert(pin.clone());
    }
    groups.into_values().collect()
}

/// One pattern step, as plain data for the reference matcher.
#[derive(Debug, Clone)]
pub enum RefStep {
    /// (name glob, deviceset glob, value glob)
    Part(Option<String>, Option<String>, Option<String>),
    Pin(String),
    Net(String),
}

impl RefStep {
    pub fn text(&self) -> String {
        match self {
            RefStep::Part(None, None, None) => "part(*)".into(),
            RefStep::Part(n, d, v) => {
                let args: Vec<String> = [("name", n), ("deviceset", d), ("value", v)]
                    .iter()
                    .filter_map(|(k, g)| g.as_ref().map(|g| format!("{k}={g}")))
                    .collect();
                format!("part({})", args.join(","))
            }
            RefStep::Pin(g) => format!("pin({g})"),
            RefStep::Net(g) => format!("net({g})"),
        }
    }
}

/// Reference glob: `*` any run, `?` one char. Plain recursion.
pub fn glob(p: &[char], t: &[char]) -> bool {
    match (p.first(), t.first()) {
        (None, None) => true,
        (Some('*'), _) => glob(&p[1..], t) || (!t.is_empty() && glob(p, &t[1..])),
        (Some('?'), Some(_)) => glob(&p[1..], &t[1..]),
        (Some(a), Some(b)) if a == b => glob(&p[1..], &t[1..]),
        _ => false,
    }
}

pub fn glob_str(p: &str, t: &str) -> bool {
    glob(&p.chars().collect::<Vec<_>>(), &t.chars().collect::<Vec<_>>())
}

/// A bound step rendered as text: part name, `part.gate.pin`, or canonical net.
pub type RefBinding = Vec<String>;

/// Exhaustive depth-first enumeration of every walk the pattern allows.
pub fn reference_matches(raw: &RawSchematic, steps: &[RefStep]) -> Vec<RefBinding> {
    let nets: Vec<OracleNet> = oracle_nets(raw).into_iter().collect();
    let net_of = |pin: &RawPin| nets.iter().position(|n| n.pins.contains(pin));
    let part_ok = |name: &str, step: &RefStep| {
        let RefStep::Part(n, d, v) = step else { unreachable!() };
        let p = raw.parts.iter().find(|p| p.name == name).unwrap();
        n.as_ref().is_none_or(|g| glob_str(g, &p.name))
            && d.as_ref().is_none_or(|g| glob_str(g, p.deviceset))
            && v.as_ref().is_none_or(|g| glob_str(g, p.value.unwrap_or("")))
    };
    let glob_of = |s: &RefStep| match s {
        RefStep::Pin(g) | RefStep::Net(g) => g.clone(),
        RefStep::Part(..) => unreachable!(),
    };
    let all_pins: Vec<RawPin> = raw
        .parts
        .iter()
        .flat_map(|p| {
            gates_of(p.deviceset)
                .iter()
                .flat_map(move |g| PINS.iter().map(move |pin| (p.name.clone(), g.to_string(), pin.to_string())))
        })
        .collect();

    let mut out = Vec::new();
    // (step index, net entered through, parts used, bound steps)
    type Partial = (usize, Option<usize>, Vec<String>, Vec<String>);
    let mut stack: Vec<Partial> = Vec::new();
    for p in &raw.parts {
        if part_ok(&p.name, &steps[0]) {
            stack.push((0, None, vec![p.name.clone()], vec![p.name.clone()]));
        }
    }
    while let Some((at, entered, used, path)) = stack.pop() {
        if at + 1 == steps.len() {
            out.push(path);
            continue;
        }
        let current = used.last().unwrap().clone();
        for exit in all_pins.iter().filter(|p| p.0 == current) {
            if !glob_str(&glob_of(&steps[at + 1]), &exit.2) {
                continue;
            }
            let Some(ni) = net_of(exit) else { continue };
            if Some(ni) == entered || !nets[ni].names.iter().any(|a| glob_str(&glob_of(&steps[at + 2]), a)) {
                continue;
            }
            let mut p2 = path.clone();
            p2.push(format!("{}.{}.{}", exit.0, exit.1, exit.2));
            p2.push(nets[ni].canonical().to_string());
            if at + 3 == steps.len() {
                out.push(p2);
                continue;
            }
            for entry in &nets[ni].pins {
                if used.contains(&entry.0)
                    || !glob_str(&glob_of(&steps[at + 3]), &entry.2)
                    || !part_ok(&entry.0, &steps[at + 4])
                {
                    continue;
                }
                let mut p3 = p2.clone();
                p3.push(format!("{}.{}.{}", entry.0, entry.1, entry.2));
                p3.push(entry.0.clone());
                let mut u2 = used.clone();
                u2.push(entry.0.clone());
                stack.push((at + 4, Some(ni), u2, p3));
            }
        }
    }
    out.sort();
    out
}

/// Random patterns with 1..=3 net hops.
pub fn random_pattern() -> impl Strategy<Value = Vec<RefStep>> {
    let g_part = prop_oneof![
        Just(RefStep::Part(None, None, None)),
        Just(RefStep::Part(Some("X1".into()), None, None)),
        Just(RefStep::Part(Some("X?".into()), None, None)),
        Just(RefStep::Part(None, Some("DUO".into()), None)),
        Just(RefStep::Part(None, Some("S*".into()), None)),
        Just(RefStep::Part(None, None, Some("1*".into()))),
        Just(RefStep::Part(Some("X*".into()), Some("*O*".into()), Some("*".into()))),
    ];
    let g_pin = prop_oneof![Just("*"), Just("P1"), Just("P2"), Just("P?"), Just("*3")].prop_map(|s| RefStep::Pin(s.into()));
    let g_net = prop_oneof![Just("*"), Just("N1"), Just("N?"), Just("N1*"), Just("N2")].prop_map(|s| RefStep::Net(s.into()));
    let hop = (g_pin.clone(), g_net.clone(), g_pin.clone(), g_part.clone());
    (g_part, proptest::collection::vec(hop, 0..=3), proptest::option::of((g_pin, g_net)))
        .prop_filter("at least one net hop", |(_, hops, tail)| !hops.is_empty() || tail.is_some())
        .prop_filter("at most three net hops", |(_, hops, tail)| hops.len() + usize::from(tail.is_some()) <= 3)
        .prop_map(|(first, hops, tail)| {
            let mut steps = vec![first];
            for (a, b, c, d) in hops {
                steps.extend([a, b, c, d]);
            }
            if let Some((a, b)) = tail {
                steps.extend([a, b]);
            }
            steps
        })
}
