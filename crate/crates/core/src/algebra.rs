//! Finite pointed algebras and their elementary operations.
//!
//! The carrier of an algebra of size `n` is `0..n`. Every operation is a flat
//! table in row-major order: the last argument varies fastest, so the entry
//! for `f(a_1, ..., a_k)` sits at index `a_1 n^(k-1) + ... + a_k`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::space::{generate, Space, TupleCodec};

/// A carrier element.
pub type Elem = usize;

/// Largest carrier that `power_algebra` will materialise by default.
pub const DEFAULT_POWER_LIMIT: usize = 256;

/// Upper bound on the number of table entries of any materialised operation.
const MAX_TABLE_ENTRIES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("carrier must be non-empty")]
    EmptyCarrier,
    #[error("zero out of range: zero = {zero}, size = {size}")]
    ZeroOutOfRange { zero: Elem, size: usize },
    #[error("duplicate operation name `{0}`")]
    DuplicateOperation(String),
    #[error("operation `{op}`: expected {expected} entries, found {found}")]
    TableLength { op: String, expected: usize, found: usize },
    #[error("operation `{op}`: entry {index} is {value}, out of range for size {size}")]
    EntryOutOfRange {
        op: String,
        index: usize,
        value: Elem,
        size: usize,
    },
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("operation `{op}` has arity {expected}, applied to {found} arguments")]
    ArityMismatch { op: String, expected: usize, found: usize },
    #[error("variable x{index} out of range for an environment of length {len}")]
    VarOutOfRange { index: usize, len: usize },
    #[error("signatures differ: {0}")]
    SignatureMismatch(String),
    #[error("map has {found} entries, domain has {expected} elements")]
    MapLength { expected: usize, found: usize },
    #[error("map sends {from} to {to}, outside a codomain of size {size}")]
    MapOutOfRange { from: Elem, to: Elem, size: usize },
    #[error("power {size}^{k} exceeds the limit {limit}")]
    PowerTooLarge { size: usize, k: usize, limit: usize },
    #[error("more than {limit} subuniverses of the power {size}^{k}")]
    TooManySubuniverses { size: usize, k: usize, limit: usize },
}

/// A named basic operation, stored as a flat row-major table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    name: String,
    arity: usize,
    table: Vec<Elem>,
}

impl Operation {
    pub fn new(name: impl Into<String>, arity: usize, table: Vec<Elem>) -> Operation {
        Operation {
            name: name.into(),
            arity,
            table,
        }
    }

    /// Tabulates `f` over all `arity`-tuples of a carrier of size `size`.
    pub fn from_fn<F>(name: impl Into<String>, arity: usize, size: usize, f: F) -> Operation
    where
        F: Fn(&[Elem]) -> Elem,
    {
        let codec = TupleCodec::new(size, arity);
        let mut args = vec![0; arity];
        let table = (0..codec.len())
            .map(|idx| {
                codec.decode_into(idx, &mut args);
                f(&args)
            })
            .collect();
        Operation::new(name, arity, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }
}

/// A finite algebra with a designated base point `zero`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    zero: Elem,
    operations: Vec<Operation>,
}

impl FiniteAlgebra {
    /// Validates and builds an algebra.
    ///
    /// Nullary operations whose value differs from `zero` are accepted, but a
    /// warning is logged: every pointed check uses the designated zero.
    pub fn new(
        name: impl Into<String>,
        size: usize,
        zero: Elem,
        operations: Vec<Operation>,
    ) -> Result<FiniteAlgebra, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        if zero >= size {
            return Err(AlgebraError::ZeroOutOfRange { zero, size });
        }
        let mut seen = BTreeSet::new();
        for op in &operations {
            if !seen.insert(op.name.as_str()) {
                return Err(AlgebraError::DuplicateOperation(op.name.clone()));
            }
            let expected = checked_pow(size, op.arity).unwrap_or(usize::MAX);
            if op.table.len() != expected {
                return Err(AlgebraError::TableLength {
                    op: op.name.clone(),
                    expected,
                    found: op.table.len(),
                });
            }
            if let Some((index, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(AlgebraError::EntryOutOfRange {
                    op: op.name.clone(),
                    index,
                    value,
                    size,
                });
            }
        }
        let alg = FiniteAlgebra {
            name: name.into(),
            size,
            zero,
            operations,
        };
        for c in alg.stray_constants() {
            log::warn!(
                "{}: constant `{}` differs from the designated zero {}",
                alg.name,
                c,
                alg.zero
            );
        }
        Ok(alg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    pub fn operation(&self, name: &str) -> Option<(usize, &Operation)> {
        self.operations.iter().enumerate().find(|(_, op)| op.name == name)
    }

    /// `(name, arity)` pairs in declaration order.
    pub fn signature(&self) -> Vec<(&str, usize)> {
        self.operations.iter().map(|op| (op.name.as_str(), op.arity)).collect()
    }

    /// Names of nullary operations whose value is not the designated zero.
    pub fn stray_constants(&self) -> Vec<&str> {
        self.operations
            .iter()
            .filter(|op| op.arity == 0 && op.table[0] != self.zero)
            .map(|op| op.name.as_str())
            .collect()
    }

    /// Applies the operation at position `op` to `args`.
    ///
    /// Panics if `args` has the wrong length or holds out-of-range elements.
    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let op = &self.operations[op];
        debug_assert_eq!(op.arity, args.len());
        op.table[table_index(self.size, args)]
    }

    /// Renames the algebra, keeping everything else.
    pub fn with_name(mut self, name: impl Into<String>) -> FiniteAlgebra {
        self.name = name.into();
        self
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {}, zero {}", self.name, self.size, self.zero)?;
        for op in &self.operations {
            write!(f, ", {}/{}", op.name, op.arity)?;
        }
        write!(f, ")")
    }
}

/// Row-major index of `args` in a table over a carrier of size `size`.
#[inline]
pub fn table_index(size: usize, args: &[Elem]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// The subuniverse generated by `generators` together with the base point.
pub fn subalgebra_closure(alg: &FiniteAlgebra, generators: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    let mut seeds = vec![alg.zero];
    seeds.extend(generators.iter().copied().filter(|&g| g < alg.size));
    generate(alg, &[], &seeds).into_iter().collect()
}

/// The `k`-th direct power, with tuples encoded by [`TupleCodec`] (first
/// component most significant). Fails if `size^k` exceeds `limit`.
pub fn power_algebra(alg: &FiniteAlgebra, k: usize, limit: usize) -> Result<FiniteAlgebra, AlgebraError> {
    assert!(k >= 1, "power exponent must be positive");
    let too_large = AlgebraError::PowerTooLarge {
        size: alg.size,
        k,
        limit,
    };
    let n = match checked_pow(alg.size, k) {
        Some(n) if n <= limit => n,
        _ => return Err(too_large),
    };
    let space = PowerSpace::new(alg, k);
    let mut operations = Vec::with_capacity(alg.operations.len());
    for (i, op) in alg.operations.iter().enumerate() {
        match checked_pow(n, op.arity) {
            Some(len) if len <= MAX_TABLE_ENTRIES => {}
            _ => return Err(too_large),
        }
        let table = Operation::from_fn(op.name.clone(), op.arity, n, |args| space.apply(i, args));
        operations.push(table);
    }
    let zero = space.codec().encode(&vec![alg.zero; k]);
    FiniteAlgebra::new(format!("{}^{}", alg.name, k), n, zero, operations)
}

/// Checks that `f` preserves the base point and commutes with every
/// operation. Operations are matched by name.
pub fn is_homomorphism(domain: &FiniteAlgebra, codomain: &FiniteAlgebra, f: &[Elem]) -> Result<bool, AlgebraError> {
    let pairs = match_signatures(domain, codomain)?;
    if f.len() != domain.size {
        return Err(AlgebraError::MapLength {
            expected: domain.size,
            found: f.len(),
        });
    }
    if let Some((from, &to)) = f.iter().enumerate().find(|(_, &t)| t >= codomain.size) {
        return Err(AlgebraError::MapOutOfRange {
            from,
            to,
            size: codomain.size,
        });
    }
    Ok(commutes(domain, codomain, &pairs, f))
}

/// Pairs each operation of `domain` with the same-named operation of
/// `codomain`.
pub(crate) fn match_signatures(
    domain: &FiniteAlgebra,
    codomain: &FiniteAlgebra,
) -> Result<Vec<(usize, usize)>, AlgebraError> {
    if domain.operations.len() != codomain.operations.len() {
        return Err(AlgebraError::SignatureMismatch(format!(
            "{} operations vs {}",
            domain.operations.len(),
            codomain.operations.len()
        )));
    }
    domain
        .operations
        .iter()
        .enumerate()
        .map(|(i, op)| match codomain.operation(&op.name) {
            Some((j, other)) if other.arity == op.arity => Ok((i, j)),
            Some((_, other)) => Err(AlgebraError::SignatureMismatch(format!(
                "`{}` has arity {} vs {}",
                op.name, op.arity, other.arity
            ))),
            None => Err(AlgebraError::SignatureMismatch(format!(
                "`{}` missing from codomain",
                op.name
            ))),
        })
        .collect()
}

pub(crate) fn commutes(domain: &FiniteAlgebra, codomain: &FiniteAlgebra, pairs: &[(usize, usize)], f: &[Elem]) -> bool {
    if f[domain.zero] != codomain.zero {
        return false;
    }
    for &(i, j) in pairs {
        let arity = domain.operations[i].arity;
        let codec = TupleCodec::new(domain.size, arity);
        let mut args = vec![0; arity];
        let mut image = vec![0; arity];
        for (idx, &out) in domain.operations[i].table.iter().enumerate() {
            codec.decode_into(idx, &mut args);
            for (dst, &a) in image.iter_mut().zip(&args) {
                *dst = f[a];
            }
            if f[out] != codomain.apply(j, &image) {
                return false;
            }
        }
    }
    true
}

/// Componentwise view of `A^k` without materialising its tables.
pub(crate) struct PowerSpace<'a> {
    alg: &'a FiniteAlgebra,
    codec: TupleCodec,
}

impl<'a> PowerSpace<'a> {
    pub(crate) fn new(alg: &'a FiniteAlgebra, k: usize) -> PowerSpace<'a> {
        PowerSpace {
            alg,
            codec: TupleCodec::new(alg.size, k),
        }
    }

    pub(crate) fn codec(&self) -> &TupleCodec {
        &self.codec
    }
}

impl Space for PowerSpace<'_> {
    fn points(&self) -> usize {
        self.codec.len()
    }

    fn arities(&self) -> Vec<usize> {
        self.alg.operations.iter().map(|op| op.arity).collect()
    }

    fn apply(&self, op: usize, args: &[usize]) -> usize {
        let k = self.codec.arity();
        let mut cols = vec![0; k * args.len()];
        for (j, &a) in args.iter().enumerate() {
            self.codec.decode_into(a, &mut cols[j * k..(j + 1) * k]);
        }
        let mut column = vec![0; args.len()];
        let mut out = 0;
        for c in 0..k {
            for (j, slot) in column.iter_mut().enumerate() {
                *slot = cols[j * k + c];
            }
            out = out * self.alg.size + self.alg.apply(op, &column);
        }
        out
    }
}

impl Space for FiniteAlgebra {
    fn points(&self) -> usize {
        self.size
    }

    fn arities(&self) -> Vec<usize> {
        self.operations.iter().map(|op| op.arity).collect()
    }

    fn apply(&self, op: usize, args: &[usize]) -> usize {
        FiniteAlgebra::apply(self, op, args)
    }
}
