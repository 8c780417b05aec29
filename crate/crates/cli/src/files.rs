//! JSON documents for algebras and relations.
//!
//! Tables are flat and row-major with the last argument varying fastest,
//! the same order [`subalg::FiniteAlgebra`] uses internally.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subalg::algebra::AlgebraError;
use subalg::{corpus, Elem, FiniteAlgebra, Operation, Relation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// Malformed document; `field` is the path to the offending value.
    #[error("{path}:{line}:{column}: {field}: {msg}")]
    Syntax {
        path: PathBuf,
        line: usize,
        column: usize,
        field: String,
        msg: String,
    },
    /// Well-formed but violates an algebra or relation invariant.
    #[error("{path}: {field}: {msg}")]
    Invalid { path: PathBuf, field: String, msg: String },
    #[error("`{0}` is neither a readable file nor a bundled algebra (see --corpus)")]
    UnknownAlgebra(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub name: String,
    pub arity: usize,
    pub table: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub size: usize,
    pub zero: Elem,
    #[serde(default)]
    pub operations: Vec<OperationDoc>,
}

impl AlgebraDoc {
    pub fn from_algebra(alg: &FiniteAlgebra) -> AlgebraDoc {
        AlgebraDoc {
            name: Some(alg.name().to_owned()),
            size: alg.size(),
            zero: alg.zero(),
            operations: alg
                .operations()
                .iter()
                .map(|op| OperationDoc {
                    name: op.name().to_owned(),
                    arity: op.arity(),
                    table: op.table().to_vec(),
                })
                .collect(),
        }
    }

    /// Builds and validates the algebra. Errors name the offending field.
    pub fn to_algebra(&self, default_name: &str) -> Result<FiniteAlgebra, (String, AlgebraError)> {
        let ops = self
            .operations
            .iter()
            .map(|op| Operation::new(op.name.clone(), op.arity, op.table.clone()))
            .collect();
        let name = self.name.as_deref().unwrap_or(default_name);
        FiniteAlgebra::new(name, self.size, self.zero, ops).map_err(|e| (self.field_of(&e), e))
    }

    fn field_of(&self, e: &AlgebraError) -> String {
        let index_of = |name: &str| self.operations.iter().position(|o| o.name == name);
        match e {
            AlgebraError::EmptyCarrier => "size".to_owned(),
            AlgebraError::ZeroOutOfRange { .. } => "zero".to_owned(),
            AlgebraError::DuplicateOperation(name) => {
                let i = self.operations.iter().rposition(|o| &o.name == name).unwrap_or(0);
                format!("operations[{i}].name")
            }
            AlgebraError::TableLength { op, .. } => match index_of(op) {
                Some(i) => format!("operations[{i}].table"),
                None => "operations".to_owned(),
            },
            AlgebraError::EntryOutOfRange { op, index, .. } => match index_of(op) {
                Some(i) => format!("operations[{i}].table[{index}]"),
                None => "operations".to_owned(),
            },
            _ => "operations".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub arity: usize,
    pub tuples: Vec<Vec<Elem>>,
}

/// A relation read from a file, with the number of duplicate tuples that
/// were dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRelation {
    pub relation: Relation,
    pub duplicates: usize,
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, FileError> {
    let syntax = |field: String, e: serde_json::Error| FileError::Syntax {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        field,
        msg: strip_position(&e.to_string()),
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        syntax(field, e.into_inner())
    })?;
    de.end().map_err(|e| syntax(".".to_owned(), e))?;
    Ok(value)
}

// serde_json appends " at line L column C"; we report the position separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_owned(),
        None => msg.to_owned(),
    }
}

/// Parses an algebra document. `path` is used for diagnostics and, if the
/// document has no name, for the algebra's name.
pub fn parse_algebra_str(path: &Path, text: &str) -> Result<FiniteAlgebra, FileError> {
    let doc: AlgebraDoc = parse_json(path, text)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("algebra");
    doc.to_algebra(stem).map_err(|(field, e)| FileError::Invalid {
        path: path.to_owned(),
        field,
        msg: e.to_string(),
    })
}

pub fn parse_algebra_file(path: &Path) -> Result<FiniteAlgebra, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_algebra_str(path, &text)
}

/// Parses a relation document over a carrier of the given size.
pub fn parse_relation_str(path: &Path, text: &str, size: usize) -> Result<ParsedRelation, FileError> {
    let doc: RelationDoc = parse_json(path, text)?;
    let invalid = |field: String, msg: String| FileError::Invalid {
        path: path.to_owned(),
        field,
        msg,
    };
    let count = doc.tuples.len();
    let relation = Relation::new(doc.arity, doc.tuples).map_err(|e| {
        let field = match e {
            subalg::relation::RelationError::Ragged { index, .. } => format!("tuples[{index}]"),
            _ => "arity".to_owned(),
        };
        invalid(field, e.to_string())
    })?;
    relation.check_range(size).map_err(|e| {
        let field = match e {
            subalg::relation::RelationError::OutOfRange { index, .. } => format!("tuples[{index}]"),
            _ => "tuples".to_owned(),
        };
        invalid(field, e.to_string())
    })?;
    let duplicates = count - relation.len();
    if duplicates > 0 {
        log::debug!("{}: {duplicates} duplicate tuple(s) removed", path.display());
    }
    Ok(ParsedRelation { relation, duplicates })
}

pub fn parse_relation_file(path: &Path, size: usize) -> Result<ParsedRelation, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_relation_str(path, &text, size)
}

/// Resolves an algebra argument: an existing file is parsed, otherwise the
/// name is looked up in the bundled corpus.
pub fn load_algebra(arg: &str) -> Result<FiniteAlgebra, FileError> {
    let path = Path::new(arg);
    if path.is_file() {
        return parse_algebra_file(path);
    }
    corpus::by_name(arg).ok_or_else(|| FileError::UnknownAlgebra(arg.to_owned()))
}
