//! File formats, reports and the command line for `pcblint`.
//!
//! The analysis itself lives in [`pcblint_core`]; this crate reads and
//! writes the files around it: rule-set configuration (TOML), waiver files,
//! review ledgers (JSON), bill-of-material CSV and check reports.

pub mod atomic;
pub mod bom_csv;
pub mod cli;
pub mod config;
pub mod inputs;
pub mod ledger_file;
pub mod report;
pub mod waiver_file;

pub use pcblint_core as core;
