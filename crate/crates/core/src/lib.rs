//! Design-rule lint engine for Eagle PCB designs.
//!
//! The crate is `no_std` (it needs `alloc`). It parses Eagle schematic,
//! board and library files, derives the pin-level netlist, evaluates style
//! and correctness rules, reconciles findings with student waivers, scores
//! the pay-for-review ledger and builds combined bills of material. File IO,
//! configuration files and the command line live in the `pcblint` crate.

#![no_std]

extern crate alloc;

pub mod bom;
pub mod checks;
pub mod eagle;
pub mod glob;
pub mod layers;
pub mod netlist;
pub mod pattern;
pub mod query;
pub mod rules;
pub mod scoring;
pub mod units;
pub mod waivers;

pub use eagle::{
    parse_board, parse_document, parse_library, parse_schematic, BoardDoc, Document, DocumentKind,
    LibraryDoc, ParseError, SchematicDoc,
};
pub use layers::Layer;
pub use units::Mm;
