//! Combined bills of material across several schematics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::eagle::SchematicDoc;

/// What gets ordered: parts agree on all four fields or are different items.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BomKey {
    pub library: String,
    pub deviceset: String,
    pub device: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BomLine {
    pub key: BomKey,
    /// `(design, part)` pairs, sorted.
    pub refs: Vec<(String, String)>,
}

impl BomLine {
    pub fn quantity(&self) -> usize {
        self.refs.len()
    }
}

/// One line per distinct key, sorted by key. Parts without a package
/// (supply symbols, frames) are not orderable and are left out.
pub fn generate_bom<'a, I>(designs: I) -> Vec<BomLine>
where
    I: IntoIterator<Item = (&'a str, &'a SchematicDoc)>,
{
    let mut lines: BTreeMap<BomKey, Vec<(String, String)>> = BTreeMap::new();
    for (design, sch) in designs {
        for part in sch.parts() {
            if sch.package_of(part).is_none() {
                continue;
            }
            let key = BomKey {
                library: part.library.clone(),
                deviceset: part.deviceset.clone(),
                device: part.device.clone(),
                value: part.value.clone().unwrap_or_default(),
            };
            lines.entry(key).or_default().push((design.into(), part.name.clone()));
        }
    }
    lines
        .into_iter()
        .map(|(key, mut refs)| {
            refs.sort();
            BomLine { key, refs }
        })
        .collect()
}
