//! Extended matrices and the relations closed under them.
//!
//! A matrix is written row-wise: each premise row and the conclusion row is a
//! tuple pattern of variables and `0`. A relation `R` is closed under the
//! matrix when every assignment of carrier elements to the variables that
//! puts all premise rows in `R` also puts the conclusion row in `R`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteAlgebra};
use crate::relation::{compatible_relations, Relation, RelationError};
use crate::space::{find_mixed, for_each_mixed, TupleCodec};
use crate::term::Term;

/// Default bound on `size^k` for [`sweep_compatible_relations`]
/// (covers carriers up to 4 with ternary relations).
pub const DEFAULT_SWEEP_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix needs at least one premise row")]
    NoPremises,
    #[error("matrix needs at least one column")]
    NoColumns,
    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("entry refers to undeclared variable #{0}")]
    UndeclaredVariable(usize),
    #[error("term entries are not supported, only variables and 0")]
    TermEntry,
    #[error("unknown matrix `{0}` (expected diag, vars or proof3)")]
    UnknownMatrix(String),
    #[error("unknown column kind `{0}` (expected uu0 or v0v)")]
    UnknownColumn(String),
    #[error("column extensions need exactly 2 premise rows, matrix has {0}")]
    ShapeMismatch(usize),
    #[error("relation has arity {relation}, matrix has {columns} columns")]
    ArityMismatch { relation: usize, columns: usize },
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One matrix entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    /// Index into [`ExtMatrix::variables`].
    Var(usize),
    Zero,
    /// Arbitrary term over the matrix variables. Representable, but
    /// [`ExtMatrix::new`] rejects it.
    Term(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtMatrix {
    variables: Vec<String>,
    premise_rows: Vec<Vec<Entry>>,
    conclusion_row: Vec<Entry>,
}

impl ExtMatrix {
    pub fn new(
        variables: Vec<String>,
        premise_rows: Vec<Vec<Entry>>,
        conclusion_row: Vec<Entry>,
    ) -> Result<ExtMatrix, MatrixError> {
        if premise_rows.is_empty() {
            return Err(MatrixError::NoPremises);
        }
        let columns = conclusion_row.len();
        if columns == 0 {
            return Err(MatrixError::NoColumns);
        }
        for (row, entries) in premise_rows.iter().chain([&conclusion_row]).enumerate() {
            if entries.len() != columns {
                return Err(MatrixError::RowLength {
                    row,
                    expected: columns,
                    found: entries.len(),
                });
            }
            for e in entries {
                match e {
                    Entry::Var(v) if *v >= variables.len() => return Err(MatrixError::UndeclaredVariable(*v)),
                    Entry::Term(_) => return Err(MatrixError::TermEntry),
                    _ => {}
                }
            }
        }
        Ok(ExtMatrix {
            variables,
            premise_rows,
            conclusion_row,
        })
    }

    /// Builds a matrix from rows of single-letter names and `0`, e.g.
    /// `from_patterns(&["xx", "x0"], "0x")`. Variables are declared in order
    /// of first appearance.
    pub fn from_patterns(premises: &[&str], conclusion: &str) -> Result<ExtMatrix, MatrixError> {
        let mut variables: Vec<String> = Vec::new();
        let mut row = |s: &str| -> Vec<Entry> {
            s.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    if c == '0' {
                        Entry::Zero
                    } else {
                        let name = c.to_string();
                        let idx = variables.iter().position(|v| *v == name).unwrap_or_else(|| {
                            variables.push(name);
                            variables.len() - 1
                        });
                        Entry::Var(idx)
                    }
                })
                .collect()
        };
        let premise_rows: Vec<Vec<Entry>> = premises.iter().map(|p| row(p)).collect();
        let conclusion_row = row(conclusion);
        ExtMatrix::new(variables, premise_rows, conclusion_row)
    }

    pub fn columns(&self) -> usize {
        self.conclusion_row.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn premise_rows(&self) -> &[Vec<Entry>] {
        &self.premise_rows
    }

    pub fn conclusion_row(&self) -> &[Entry] {
        &self.conclusion_row
    }

    fn instantiate_into(&self, row: &[Entry], assignment: &[Elem], zero: Elem, out: &mut [Elem]) {
        for (slot, e) in out.iter_mut().zip(row) {
            *slot = match e {
                Entry::Var(v) => assignment[*v],
                Entry::Zero => zero,
                Entry::Term(_) => unreachable!("rejected at construction"),
            };
        }
    }

    /// The premise tuples and conclusion tuple under `assignment`.
    pub fn instantiate(&self, assignment: &[Elem], zero: Elem) -> (Vec<Vec<Elem>>, Vec<Elem>) {
        let n = self.columns();
        let premises = self
            .premise_rows
            .iter()
            .map(|row| {
                let mut out = vec![0; n];
                self.instantiate_into(row, assignment, zero, &mut out);
                out
            })
            .collect();
        let mut conclusion = vec![0; n];
        self.instantiate_into(&self.conclusion_row, assignment, zero, &mut conclusion);
        (premises, conclusion)
    }

    fn fresh_name(&self, base: &str) -> String {
        if !self.variables.iter().any(|v| v == base) {
            return base.to_owned();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|cand| !self.variables.contains(cand))
            .unwrap()
    }
}

impl fmt::Display for ExtMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |entries: &[Entry]| -> String {
            entries
                .iter()
                .map(|e| match e {
                    Entry::Var(v) => self.variables[*v].clone(),
                    Entry::Zero => "0".to_owned(),
                    Entry::Term(t) => t.to_string(),
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        for r in &self.premise_rows {
            writeln!(f, "{}", row(r))?;
        }
        writeln!(f, "---")?;
        write!(f, "{}", row(&self.conclusion_row))
    }
}

/// The three matrices that come with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinMatrix {
    /// `(x,x), (x,0) | (0,x)`
    Diag,
    /// `(x,y), (x,0) | (0,y)`
    Vars,
    /// `(x,y,y), (0,0,y) | (x,y,0)`
    Proof3,
}

impl BuiltinMatrix {
    pub fn matrix(self) -> ExtMatrix {
        let m = match self {
            BuiltinMatrix::Diag => ExtMatrix::from_patterns(&["xx", "x0"], "0x"),
            BuiltinMatrix::Vars => ExtMatrix::from_patterns(&["xy", "x0"], "0y"),
            BuiltinMatrix::Proof3 => ExtMatrix::from_patterns(&["xyy", "00y"], "xy0"),
        };
        m.expect("builtin matrices are well formed")
    }

    pub fn tag(self) -> &'static str {
        match self {
            BuiltinMatrix::Diag => "diag",
            BuiltinMatrix::Vars => "vars",
            BuiltinMatrix::Proof3 => "proof3",
        }
    }
}

impl FromStr for BuiltinMatrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<BuiltinMatrix, MatrixError> {
        match s {
            "diag" => Ok(BuiltinMatrix::Diag),
            "vars" => Ok(BuiltinMatrix::Vars),
            "proof3" => Ok(BuiltinMatrix::Proof3),
            other => Err(MatrixError::UnknownMatrix(other.to_owned())),
        }
    }
}

/// Looks up a builtin matrix by tag.
pub fn builtin_matrix(tag: &str) -> Result<ExtMatrix, MatrixError> {
    tag.parse::<BuiltinMatrix>().map(BuiltinMatrix::matrix)
}

/// Column shapes that may be appended to a two-premise matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    /// Premise entries `u, u`, conclusion `0`.
    Uu0,
    /// Premise entries `v, 0`, conclusion `v`.
    V0v,
}

impl ColumnKind {
    pub fn tag(self) -> &'static str {
        match self {
            ColumnKind::Uu0 => "uu0",
            ColumnKind::V0v => "v0v",
        }
    }
}

impl FromStr for ColumnKind {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<ColumnKind, MatrixError> {
        match s {
            "uu0" => Ok(ColumnKind::Uu0),
            "v0v" => Ok(ColumnKind::V0v),
            other => Err(MatrixError::UnknownColumn(other.to_owned())),
        }
    }
}

/// Appends one column of the given kind with a fresh variable.
pub fn extend_matrix(m: &ExtMatrix, kind: ColumnKind) -> Result<ExtMatrix, MatrixError> {
    if m.premise_rows.len() != 2 {
        return Err(MatrixError::ShapeMismatch(m.premise_rows.len()));
    }
    let mut out = m.clone();
    let name = out.fresh_name(match kind {
        ColumnKind::Uu0 => "u",
        ColumnKind::V0v => "v",
    });
    out.variables.push(name);
    let fresh = Entry::Var(out.variables.len() - 1);
    let (second, conclusion) = match kind {
        ColumnKind::Uu0 => (fresh.clone(), Entry::Zero),
        ColumnKind::V0v => (Entry::Zero, fresh.clone()),
    };
    out.premise_rows[0].push(fresh);
    out.premise_rows[1].push(second);
    out.conclusion_row.push(conclusion);
    Ok(out)
}

/// An assignment under which the closure condition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Variable name and value, in declaration order.
    pub assignment: Vec<(String, Elem)>,
    pub premises: Vec<Vec<Elem>>,
    /// The conclusion tuple, absent from the relation.
    pub missing: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosednessVerdict {
    pub closed: bool,
    pub counterexample: Option<Counterexample>,
}

fn check_arity(alg: &FiniteAlgebra, rel: &Relation, m: &ExtMatrix) -> Result<TupleCodec, MatrixError> {
    if rel.arity() != m.columns() {
        return Err(MatrixError::ArityMismatch {
            relation: rel.arity(),
            columns: m.columns(),
        });
    }
    rel.check_range(alg.size())?;
    Ok(TupleCodec::new(alg.size(), m.columns()))
}

/// Calls `f(assignment, premises_hold, conclusion_code)` for every assignment,
/// lexicographically (first variable most significant), until `f` returns
/// true. Returns the assignment that stopped it.
fn scan_assignments<F>(
    alg: &FiniteAlgebra,
    m: &ExtMatrix,
    codec: &TupleCodec,
    mask: &[bool],
    mut f: F,
) -> Option<Vec<Elem>>
where
    F: FnMut(bool, usize) -> bool,
{
    let mut tuple = vec![0; m.columns()];
    find_mixed(&vec![alg.size(); m.variables.len()], |assignment| {
        let holds = m.premise_rows.iter().all(|row| {
            m.instantiate_into(row, assignment, alg.zero(), &mut tuple);
            mask[codec.encode(&tuple)]
        });
        m.instantiate_into(&m.conclusion_row, assignment, alg.zero(), &mut tuple);
        f(holds, codec.encode(&tuple))
    })
}

/// Checks closedness of `rel` under `m`, reporting the lexicographically
/// first failing assignment.
pub fn is_closed(alg: &FiniteAlgebra, rel: &Relation, m: &ExtMatrix) -> Result<ClosednessVerdict, MatrixError> {
    let codec = check_arity(alg, rel, m)?;
    let mask = rel.mask(&codec);
    let failing = scan_assignments(alg, m, &codec, &mask, |holds, concl| holds && !mask[concl]);
    Ok(match failing {
        None => ClosednessVerdict {
            closed: true,
            counterexample: None,
        },
        Some(assignment) => {
            let (premises, missing) = m.instantiate(&assignment, alg.zero());
            ClosednessVerdict {
                closed: false,
                counterexample: Some(Counterexample {
                    assignment: m.variables.iter().cloned().zip(assignment).collect(),
                    premises,
                    missing,
                }),
            }
        }
    })
}

/// The least relation containing `rel` that is closed under `m`.
pub fn m_closure(alg: &FiniteAlgebra, rel: &Relation, m: &ExtMatrix) -> Result<Relation, MatrixError> {
    let codec = check_arity(alg, rel, m)?;
    let mut mask = rel.mask(&codec);
    let mut tuple = vec![0; m.columns()];
    loop {
        let mut added = Vec::new();
        for_each_mixed(&vec![alg.size(); m.variables.len()], |assignment| {
            let holds = m.premise_rows.iter().all(|row| {
                m.instantiate_into(row, assignment, alg.zero(), &mut tuple);
                mask[codec.encode(&tuple)]
            });
            if holds {
                m.instantiate_into(&m.conclusion_row, assignment, alg.zero(), &mut tuple);
                let c = codec.encode(&tuple);
                if !mask[c] {
                    added.push(c);
                }
            }
        });
        if added.is_empty() {
            return Ok(Relation::from_mask(&codec, &mask));
        }
        for c in added {
            mask[c] = true;
        }
    }
}

/// Every compatible `k`-ary relation of `alg` with its verdict under `m`.
/// Fails if `size^k` exceeds `limit`.
pub fn sweep_compatible_relations(
    alg: &FiniteAlgebra,
    k: usize,
    m: &ExtMatrix,
    limit: usize,
) -> Result<Vec<(Relation, ClosednessVerdict)>, MatrixError> {
    if k != m.columns() {
        return Err(MatrixError::ArityMismatch {
            relation: k,
            columns: m.columns(),
        });
    }
    compatible_relations(alg, k, limit)?
        .into_iter()
        .map(|r| {
            let v = is_closed(alg, &r, m)?;
            Ok((r, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn rel(arity: usize, tuples: &[&[Elem]]) -> Relation {
        Relation::new(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    fn rows(m: &ExtMatrix) -> (Vec<String>, String) {
        let mut lines: Vec<String> = m.to_string().lines().map(str::to_owned).collect();
        let concl = lines.pop().unwrap();
        lines.pop();
        (lines, concl)
    }

    #[test]
    fn builtins() {
        let d = builtin_matrix("diag").unwrap();
        assert_eq!(d.columns(), 2);
        assert_eq!(rows(&d), (vec!["x x".into(), "x 0".into()], "0 x".into()));
        let v = builtin_matrix("vars").unwrap();
        assert_eq!(rows(&v), (vec!["x y".into(), "x 0".into()], "0 y".into()));
        let p = builtin_matrix("proof3").unwrap();
        assert_eq!(p.columns(), 3);
        assert_eq!(rows(&p), (vec!["x y y".into(), "0 0 y".into()], "x y 0".into()));
        assert_eq!(builtin_matrix("nope"), Err(MatrixError::UnknownMatrix("nope".into())));
    }

    #[test]
    fn extensions() {
        let vars = builtin_matrix("vars").unwrap();
        let u = extend_matrix(&vars, ColumnKind::Uu0).unwrap();
        assert_eq!(rows(&u), (vec!["x y u".into(), "x 0 u".into()], "0 y 0".into()));
        let v = extend_matrix(&vars, ColumnKind::V0v).unwrap();
        assert_eq!(rows(&v), (vec!["x y v".into(), "x 0 0".into()], "0 y v".into()));
        let uv = extend_matrix(&u, ColumnKind::V0v).unwrap();
        assert_eq!(uv.columns(), 4);
        let uu = extend_matrix(&u, ColumnKind::Uu0).unwrap();
        assert_eq!(uu.variables(), &["x", "y", "u", "u1"]);

        let three = ExtMatrix::from_patterns(&["x", "x", "0"], "x").unwrap();
        assert_eq!(
            extend_matrix(&three, ColumnKind::Uu0),
            Err(MatrixError::ShapeMismatch(3))
        );
    }

    #[test]
    fn validation() {
        assert_eq!(
            ExtMatrix::new(vec![], vec![], vec![Entry::Zero]),
            Err(MatrixError::NoPremises)
        );
        assert!(matches!(
            ExtMatrix::new(
                vec!["x".into()],
                vec![vec![Entry::Var(0)]],
                vec![Entry::Zero, Entry::Zero]
            ),
            Err(MatrixError::RowLength { .. })
        ));
        assert_eq!(
            ExtMatrix::new(vec![], vec![vec![Entry::Var(0)]], vec![Entry::Zero]),
            Err(MatrixError::UndeclaredVariable(0))
        );
        assert_eq!(
            ExtMatrix::new(vec![], vec![vec![Entry::Term(Term::Zero)]], vec![Entry::Zero]),
            Err(MatrixError::TermEntry)
        );
    }

    #[test]
    fn closedness_examples() {
        let z2 = corpus::z2();
        let diag = builtin_matrix("diag").unwrap();
        let v = is_closed(&z2, &rel(2, &[&[0, 0], &[1, 1], &[1, 0]]), &diag).unwrap();
        assert!(!v.closed);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.assignment, vec![("x".to_owned(), 1)]);
        assert_eq!(cx.missing, vec![0, 1]);
        assert_eq!(cx.premises, vec![vec![1, 1], vec![1, 0]]);

        assert!(is_closed(&z2, &Relation::full(2, 2), &diag).unwrap().closed);
        let v = is_closed(&z2, &rel(2, &[&[0, 0]]), &diag).unwrap();
        assert!(v.closed && v.counterexample.is_none());

        assert_eq!(
            is_closed(&z2, &rel(3, &[&[0, 0, 0]]), &diag),
            Err(MatrixError::ArityMismatch {
                relation: 3,
                columns: 2
            })
        );
    }

    #[test]
    fn closure_examples() {
        let z2 = corpus::z2();
        let diag = builtin_matrix("diag").unwrap();
        let r = rel(2, &[&[0, 0], &[1, 1], &[1, 0]]);
        assert_eq!(m_closure(&z2, &r, &diag).unwrap(), Relation::full(2, 2));
        let zero = rel(2, &[&[0, 0]]);
        assert_eq!(m_closure(&z2, &zero, &diag).unwrap(), zero);
        let full = Relation::full(2, 2);
        assert_eq!(m_closure(&z2, &full, &diag).unwrap(), full);
    }

    #[test]
    fn sweep_examples() {
        let z2 = corpus::z2();
        for tag in ["diag", "vars"] {
            let m = builtin_matrix(tag).unwrap();
            let sweep = sweep_compatible_relations(&z2, 2, &m, DEFAULT_SWEEP_LIMIT).unwrap();
            assert_eq!(sweep.len(), 5);
            assert!(sweep.iter().all(|(_, v)| v.closed));
        }
        let p2 = corpus::pointed_set(2);
        let diag = builtin_matrix("diag").unwrap();
        let sweep = sweep_compatible_relations(&p2, 2, &diag, DEFAULT_SWEEP_LIMIT).unwrap();
        let target = rel(2, &[&[0, 0], &[1, 1], &[1, 0]]);
        let (_, v) = sweep.iter().find(|(r, _)| *r == target).unwrap();
        assert!(!v.closed);
        assert_eq!(v.counterexample.as_ref().unwrap().assignment, vec![("x".to_owned(), 1)]);
        assert!(matches!(
            sweep_compatible_relations(
                &corpus::z4(),
                4,
                &extend_matrix(
                    &extend_matrix(&builtin_matrix("vars").unwrap(), ColumnKind::Uu0).unwrap(),
                    ColumnKind::V0v
                )
                .unwrap(),
                DEFAULT_SWEEP_LIMIT
            ),
            Err(MatrixError::Algebra(AlgebraError::PowerTooLarge { .. }))
        ));
    }
}
