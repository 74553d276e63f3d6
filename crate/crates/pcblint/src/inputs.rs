//! Reading design files from disk.

use std::path::{Path, PathBuf};

use pcblint_core::netlist::{build_netlist, Netlist};
use pcblint_core::rules::Design;
use pcblint_core::{parse_document, BoardDoc, Document, DocumentKind, LibraryDoc, ParseError, SchematicDoc};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{second}: a {kind} was already given ({first})")]
    DuplicateKind { kind: DocumentKind, first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFile {
    pub path: String,
    pub kind: DocumentKind,
    pub sha256: String,
}

/// At most one document of each kind, with the schematic's netlist.
#[derive(Debug, Default)]
pub struct Inputs {
    pub files: Vec<InputFile>,
    pub schematic: Option<(SchematicDoc, Netlist)>,
    pub board: Option<BoardDoc>,
    pub library: Option<LibraryDoc>,
}

impl Inputs {
    pub fn design(&self) -> Design<'_> {
        let mut d = Design::new();
        if let Some((sch, nl)) = &self.schematic {
            d = d.with_schematic(sch, nl);
        }
        if let Some(b) = &self.board {
            d = d.with_board(b);
        }
        if let Some(l) = &self.library {
            d = d.with_library(l);
        }
        d
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path) -> Result<Vec<u8>, InputError> {
    std::fs::read(path).map_err(|source| InputError::Io { path: path.display().to_string(), source })
}

pub fn parse_file(path: &Path) -> Result<(Vec<u8>, Document), InputError> {
    let bytes = read(path)?;
    let doc = parse_document(&bytes).map_err(|source| InputError::Parse { path: path.display().to_string(), source })?;
    Ok((bytes, doc))
}

/// Loads each file, detecting its kind from its content.
pub fn load(paths: &[PathBuf]) -> Result<Inputs, InputError> {
    let mut inputs = Inputs::default();
    for path in paths {
        let (bytes, doc) = parse_file(path)?;
        let shown = path.display().to_string();
        let kind = doc.kind();
        if let Some(first) = inputs.files.iter().find(|f| f.kind == kind) {
            return Err(InputError::DuplicateKind { kind, first: first.path.clone(), second: shown });
        }
        inputs.files.push(InputFile { path: shown, kind, sha256: sha256_hex(&bytes) });
        match doc {
            Document::Schematic(s) => {
                let nl = build_netlist(&s);
                inputs.schematic = Some((s, nl));
            }
            Document::Board(b) => inputs.board = Some(b),
            Document::Library(l) => inputs.library = Some(l),
        }
    }
    Ok(inputs)
}
