use core::fmt;

/// An Eagle layer number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Layer(pub u8);

/// Standard Eagle layer names. Copper layers 2..=15 are `Route2`..`Route15`.
const NAMED: &[(u8, &str)] = &[
    (1, "Top"),
    (16, "Bottom"),
    (17, "Pads"),
    (18, "Vias"),
    (19, "Unrouted"),
    (20, "Dimension"),
    (21, "tPlace"),
    (22, "bPlace"),
    (23, "tOrigins"),
    (24, "bOrigins"),
    (25, "tNames"),
    (26, "bNames"),
    (27, "tValues"),
    (28, "bValues"),
    (29, "tStop"),
    (30, "bStop"),
    (31, "tCream"),
    (32, "bCream"),
    (39, "tKeepout"),
    (40, "bKeepout"),
    (41, "tRestrict"),
    (42, "bRestrict"),
    (43, "vRestrict"),
    (44, "Drills"),
    (45, "Holes"),
    (46, "Milling"),
    (47, "Measures"),
    (48, "Document"),
    (49, "Reference"),
    (51, "tDocu"),
    (52, "bDocu"),
    (91, "Nets"),
    (92, "Busses"),
    (93, "Pins"),
    (94, "Symbols"),
    (95, "Names"),
    (96, "Values"),
    (97, "Info"),
    (98, "Guide"),
];

impl Layer {
    pub const TOP: Layer = Layer(1);
    pub const BOTTOM: Layer = Layer(16);
    pub const DIMENSION: Layer = Layer(20);
    pub const T_NAMES: Layer = Layer(25);

    pub fn is_copper(self) -> bool {
        (1..=16).contains(&self.0)
    }

    pub fn name(self) -> Option<&'static str> {
        if (2..=15).contains(&self.0) {
            return Some(ROUTE_NAMES[usize::from(self.0 - 2)]);
        }
        NAMED.iter().find(|(n, _)| *n == self.0).map(|(_, name)| *name)
    }

    /// Resolves a standard layer name (`"tNames"`, `"Route2"`) or a decimal number.
    pub fn from_name(name: &str) -> Option<Layer> {
        if let Ok(n) = name.parse::<u8>() {
            return Some(Layer(n));
        }
        if let Some(i) = ROUTE_NAMES.iter().position(|r| *r == name) {
            return Some(Layer(i as u8 + 2));
        }
        NAMED.iter().find(|(_, n)| *n == name).map(|(num, _)| Layer(*num))
    }
}

const ROUTE_NAMES: [&str; 14] = [
    "Route2", "Route3", "Route4", "Route5", "Route6", "Route7", "Route8", "Route9", "Route10",
    "Route11", "Route12", "Route13", "Route14", "Route15",
];

impl From<u8> for Layer {
    fn from(n: u8) -> Self {
        Layer(n)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(name) => write!(f, "{} ({name})", self.0),
            None => write!(f, "{}", self.0),
        }
    }
}
