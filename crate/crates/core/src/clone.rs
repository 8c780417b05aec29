//! Term operations of a finite algebra and searches for subtraction and
//! Mal'tsev terms among them.
//!
//! The `k`-ary term operations form the least set of `k`-ary tables that
//! contains the projections and the constant-zero table and is closed under
//! composition with the basic operations. [`enumerate_term_operations`]
//! computes it breadth-first, one term depth per round. A round only
//! composes tuples that use at least one table found in the previous round,
//! and the tables found in a round are appended in lexicographic order, so
//! the first term recorded for a table is one of least depth and the output
//! is deterministic.
//!
//! Identities that hold in an algebra hold throughout the variety it
//! generates, so a complete search decides subtractivity of the variety.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteAlgebra};
use crate::space::{for_each_mixed, TupleCodec};
use crate::term::Term;

/// Default bound on the number of distinct tables an enumeration may hold.
pub const DEFAULT_CAP: usize = 100_000;

/// Largest table (`size^k` entries) the enumerator accepts.
pub const MAX_TABLE_LEN: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CloneError {
    #[error("term operations need arity at least 1")]
    ZeroArity,
    #[error("carrier of size {0} is too large for clone enumeration (limit 256)")]
    CarrierTooLarge(usize),
    #[error("{size}^{k} table entries exceed the limit {MAX_TABLE_LEN}")]
    TableTooLarge { size: usize, k: usize },
    #[error("operation is not a Mal'tsev operation on this algebra")]
    NotMaltsev,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Three-valued outcome of a search bounded by a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// A `k`-ary operation on a carrier, optionally with a term denoting it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationTable {
    size: usize,
    arity: usize,
    table: Vec<Elem>,
    term: Option<Term>,
}

impl OperationTable {
    /// Panics if `table` does not have `size^arity` entries.
    pub fn new(size: usize, arity: usize, table: Vec<Elem>) -> OperationTable {
        assert_eq!(
            table.len(),
            TupleCodec::new(size, arity).len(),
            "table length must be size^arity"
        );
        OperationTable {
            size,
            arity,
            table,
            term: None,
        }
    }

    pub fn from_fn<F: Fn(&[Elem]) -> Elem>(size: usize, arity: usize, f: F) -> OperationTable {
        let codec = TupleCodec::new(size, arity);
        let mut args = vec![0; arity];
        let table = (0..codec.len())
            .map(|c| {
                codec.decode_into(c, &mut args);
                f(&args)
            })
            .collect();
        OperationTable::new(size, arity, table)
    }

    /// Tabulates `term` as an `arity`-ary operation of `alg`.
    pub fn from_term(alg: &FiniteAlgebra, arity: usize, term: Term) -> Result<OperationTable, AlgebraError> {
        let codec = TupleCodec::new(alg.size(), arity);
        let mut env = vec![0; arity];
        let mut table = Vec::with_capacity(codec.len());
        for c in 0..codec.len() {
            codec.decode_into(c, &mut env);
            table.push(term.eval(alg, &env)?);
        }
        Ok(OperationTable {
            size: alg.size(),
            arity,
            table,
            term: Some(term),
        })
    }

    pub fn with_term(mut self, term: Term) -> OperationTable {
        self.term = Some(term);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn term(&self) -> Option<&Term> {
        self.term.as_ref()
    }

    #[inline]
    pub fn apply(&self, args: &[Elem]) -> Elem {
        self.table[crate::algebra::table_index(self.size, args)]
    }

    /// Binary shorthand for [`apply`](Self::apply).
    #[inline]
    pub fn apply2(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.size + b]
    }

    /// True iff there is no witness term or the term reproduces every entry.
    pub fn term_reproduces(&self, alg: &FiniteAlgebra) -> bool {
        match &self.term {
            None => true,
            Some(t) => OperationTable::from_term(alg, self.arity, t.clone())
                .map(|o| o.table == self.table)
                .unwrap_or(false),
        }
    }
}

#[derive(Debug, Clone)]
enum Origin {
    Var(usize),
    Zero,
    App { op: usize, args: Vec<u32> },
}

/// The `k`-ary term operations found by [`enumerate_term_operations`].
///
/// Tables are indexed in discovery order: by depth of their witness term,
/// then lexicographically within a depth.
#[derive(Debug, Clone)]
pub struct TermClone {
    size: usize,
    arity: usize,
    stride: usize,
    op_names: Vec<String>,
    data: Vec<u8>,
    origins: Vec<Origin>,
    depths: Vec<u32>,
    index: HashMap<Box<[u8]>, u32>,
    complete: bool,
    cap: usize,
}

impl TermClone {
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// False when the cap stopped the enumeration before its fixpoint.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// The cap the enumeration ran under (0 = unlimited).
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depths[i] as usize
    }

    fn raw(&self, i: usize) -> &[u8] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn table(&self, i: usize) -> Vec<Elem> {
        self.raw(i).iter().map(|&v| v as Elem).collect()
    }

    /// The first term found for table `i`.
    pub fn term(&self, i: usize) -> Term {
        match &self.origins[i] {
            Origin::Var(v) => Term::Var(*v),
            Origin::Zero => Term::Zero,
            Origin::App { op, args } => Term::App(
                self.op_names[*op].clone(),
                args.iter().map(|&a| self.term(a as usize)).collect(),
            ),
        }
    }

    pub fn operation(&self, i: usize) -> OperationTable {
        OperationTable {
            size: self.size,
            arity: self.arity,
            table: self.table(i),
            term: Some(self.term(i)),
        }
    }

    pub fn position(&self, table: &[Elem]) -> Option<usize> {
        if table.len() != self.stride || table.iter().any(|&v| v >= self.size) {
            return None;
        }
        let key: Vec<u8> = table.iter().map(|&v| v as u8).collect();
        self.index.get(key.as_slice()).map(|&i| i as usize)
    }

    /// Indices ordered lexicographically by table.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.len()).collect();
        ids.sort_by(|&a, &b| self.raw(a).cmp(self.raw(b)));
        ids
    }

    /// All operations, lexicographically by table.
    pub fn operations(&self) -> Vec<OperationTable> {
        self.sorted_indices().into_iter().map(|i| self.operation(i)).collect()
    }
}

/// Enumerates the `k`-ary term operations of `alg`, stopping once more than
/// `cap` distinct tables would be needed (`cap == 0` means no bound). The
/// result says whether the fixpoint was reached.
pub fn enumerate_term_operations(alg: &FiniteAlgebra, k: usize, cap: usize) -> Result<TermClone, CloneError> {
    if k == 0 {
        return Err(CloneError::ZeroArity);
    }
    let n = alg.size();
    if n > 256 {
        return Err(CloneError::CarrierTooLarge(n));
    }
    let stride = match crate::algebra::checked_pow(n, k) {
        Some(s) if s <= MAX_TABLE_LEN => s,
        _ => return Err(CloneError::TableTooLarge { size: n, k }),
    };
    let codec = TupleCodec::new(n, k);
    let op_tables: Vec<Vec<u8>> = alg
        .operations()
        .iter()
        .map(|op| op.table().iter().map(|&v| v as u8).collect())
        .collect();

    let mut clone = TermClone {
        size: n,
        arity: k,
        stride,
        op_names: alg.operations().iter().map(|op| op.name().to_owned()).collect(),
        data: Vec::new(),
        origins: Vec::new(),
        depths: Vec::new(),
        index: HashMap::new(),
        complete: false,
        cap,
    };
    let full = |count: usize| cap != 0 && count >= cap;

    let append = |clone: &mut TermClone, table: Box<[u8]>, origin: Origin, depth: u32| {
        let id = clone.origins.len() as u32;
        clone.data.extend_from_slice(&table);
        clone.index.insert(table, id);
        clone.origins.push(origin);
        clone.depths.push(depth);
    };

    // depth 0: projections, then the constant zero
    let mut digits = vec![0; k];
    let mut seeds: Vec<(Box<[u8]>, Origin)> = (0..k)
        .map(|v| {
            let table = (0..stride)
                .map(|c| {
                    codec.decode_into(c, &mut digits);
                    digits[v] as u8
                })
                .collect();
            (table, Origin::Var(v))
        })
        .collect();
    seeds.push((vec![alg.zero() as u8; stride].into_boxed_slice(), Origin::Zero));
    for (table, origin) in seeds {
        if clone.index.contains_key(&table) {
            continue;
        }
        if full(clone.len()) {
            return Ok(clone);
        }
        append(&mut clone, table, origin, 0);
    }

    let mut start = 0;
    let mut depth = 1u32;
    let mut scratch = vec![0u8; stride];
    let mut args = Vec::new();
    loop {
        let end = clone.len();
        let mut fresh: Vec<(Box<[u8]>, Origin)> = Vec::new();
        let mut fresh_index: HashMap<Box<[u8]>, ()> = HashMap::new();
        let mut stopped = false;

        for (op, op_table) in op_tables.iter().enumerate() {
            let m = alg.operations()[op].arity();
            if m == 0 {
                if depth == 1 {
                    let table = vec![op_table[0]; stride].into_boxed_slice();
                    if !clone.index.contains_key(&table) && !fresh_index.contains_key(&table) {
                        if full(end + fresh.len()) {
                            stopped = true;
                            break;
                        }
                        fresh_index.insert(table.clone(), ());
                        fresh.push((table, Origin::App { op, args: vec![] }));
                    }
                }
                continue;
            }
            // every argument tuple over 0..end with some entry >= start
            let mut prefix = vec![0usize; m - 1];
            'prefixes: loop {
                let old_prefix = prefix.iter().all(|&p| p < start);
                let first_last = if old_prefix { start } else { 0 };
                for last in first_last..end {
                    args.clear();
                    args.extend(prefix.iter().map(|&p| p as u32));
                    args.push(last as u32);
                    for (c, slot) in scratch.iter_mut().enumerate() {
                        let idx = args
                            .iter()
                            .fold(0usize, |acc, &a| acc * n + clone.data[a as usize * stride + c] as usize);
                        *slot = op_table[idx];
                    }
                    if clone.index.contains_key(scratch.as_slice()) || fresh_index.contains_key(scratch.as_slice()) {
                        continue;
                    }
                    if full(end + fresh.len()) {
                        stopped = true;
                        break 'prefixes;
                    }
                    let table: Box<[u8]> = scratch.clone().into_boxed_slice();
                    fresh_index.insert(table.clone(), ());
                    fresh.push((table, Origin::App { op, args: args.clone() }));
                }
                // advance the prefix odometer
                let mut pos = prefix.len();
                loop {
                    if pos == 0 {
                        break 'prefixes;
                    }
                    pos -= 1;
                    prefix[pos] += 1;
                    if prefix[pos] < end {
                        break;
                    }
                    prefix[pos] = 0;
                }
            }
            if stopped {
                break;
            }
        }

        let found_any = !fresh.is_empty();
        fresh.sort_by(|a, b| a.0.cmp(&b.0));
        for (table, origin) in fresh {
            append(&mut clone, table, origin, depth);
        }
        if stopped {
            return Ok(clone);
        }
        if !found_any {
            clone.complete = true;
            return Ok(clone);
        }
        start = end;
        depth += 1;
    }
}

/// A binary term operation `s` with `s(a, 0) = a` and `s(a, a) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtractionWitness {
    pub op: OperationTable,
    /// Whether `s` is a homomorphism `A^2 -> A` of the whole algebra.
    pub homomorphic: bool,
}

/// Witnesses found by a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSearch<W> {
    pub witnesses: Vec<W>,
    /// The underlying enumeration reached its fixpoint.
    pub complete: bool,
    /// Number of term operations examined.
    pub examined: usize,
    pub cap: usize,
}

impl<W> WitnessSearch<W> {
    pub fn verdict(&self) -> Verdict {
        if !self.witnesses.is_empty() {
            Verdict::Yes
        } else if self.complete {
            Verdict::No
        } else {
            Verdict::Unknown
        }
    }
}

pub fn is_subtraction(alg: &FiniteAlgebra, s: &OperationTable) -> bool {
    s.arity == 2
        && s.size == alg.size()
        && alg
            .elements()
            .all(|a| s.apply2(a, alg.zero()) == a && s.apply2(a, a) == alg.zero())
}

pub fn is_maltsev(alg: &FiniteAlgebra, p: &OperationTable) -> bool {
    p.arity == 3
        && p.size == alg.size()
        && alg.elements().all(|a| {
            alg.elements()
                .all(|b| p.apply(&[a, b, b]) == a && p.apply(&[b, b, a]) == a)
        })
}

/// The subtraction witnesses among the binary operations of `clone`, in
/// lexicographic order of their tables.
pub fn subtraction_witnesses(alg: &FiniteAlgebra, clone: &TermClone) -> WitnessSearch<SubtractionWitness> {
    assert_eq!(clone.arity(), 2, "subtraction witnesses are binary");
    let witnesses = clone
        .operations()
        .into_iter()
        .filter(|op| is_subtraction(alg, op))
        .map(|op| SubtractionWitness {
            homomorphic: is_homomorphic_operation(alg, &op),
            op,
        })
        .collect();
    WitnessSearch {
        witnesses,
        complete: clone.is_complete(),
        examined: clone.len(),
        cap: clone.cap(),
    }
}

pub fn find_subtraction_witnesses(
    alg: &FiniteAlgebra,
    cap: usize,
) -> Result<WitnessSearch<SubtractionWitness>, CloneError> {
    let clone = enumerate_term_operations(alg, 2, cap)?;
    Ok(subtraction_witnesses(alg, &clone))
}

/// Ternary term operations `p` with `p(a,b,b) = a = p(b,b,a)`.
pub fn find_maltsev_witnesses(alg: &FiniteAlgebra, cap: usize) -> Result<WitnessSearch<OperationTable>, CloneError> {
    let clone = enumerate_term_operations(alg, 3, cap)?;
    let witnesses = clone
        .operations()
        .into_iter()
        .filter(|op| is_maltsev(alg, op))
        .collect();
    Ok(WitnessSearch {
        witnesses,
        complete: clone.is_complete(),
        examined: clone.len(),
        cap,
    })
}

/// `s(x, y) = p(x, y, 0)`.
pub fn maltsev_to_subtraction(p: &OperationTable, alg: &FiniteAlgebra) -> Result<OperationTable, CloneError> {
    if !is_maltsev(alg, p) {
        return Err(CloneError::NotMaltsev);
    }
    let z = alg.zero();
    let s = OperationTable::from_fn(alg.size(), 2, |a| p.apply(&[a[0], a[1], z]));
    Ok(match p.term() {
        Some(t) => s.with_term(t.substitute(2, &Term::Zero)),
        None => s,
    })
}

/// True iff `t`, read as a map `alg^k -> alg`, preserves the base point and
/// commutes with every basic operation.
pub fn is_homomorphic_operation(alg: &FiniteAlgebra, t: &OperationTable) -> bool {
    let k = t.arity;
    let n = alg.size();
    if t.apply(&vec![alg.zero(); k]) != alg.zero() {
        return false;
    }
    let codec = TupleCodec::new(n, k);
    for (op_idx, op) in alg.operations().iter().enumerate() {
        let m = op.arity();
        let mut points = vec![0; m * k];
        let mut column = vec![0; m];
        let mut lhs_arg = vec![0; k];
        let mut rhs_arg = vec![0; m];
        let mut ok = true;
        for_each_mixed(&vec![codec.len(); m], |codes| {
            if !ok {
                return;
            }
            for (j, &c) in codes.iter().enumerate() {
                codec.decode_into(c, &mut points[j * k..(j + 1) * k]);
            }
            for (i, slot) in lhs_arg.iter_mut().enumerate() {
                for (j, col) in column.iter_mut().enumerate() {
                    *col = points[j * k + i];
                }
                *slot = alg.apply(op_idx, &column);
            }
            for (j, slot) in rhs_arg.iter_mut().enumerate() {
                *slot = t.apply(&points[j * k..(j + 1) * k]);
            }
            ok = t.apply(&lhs_arg) == alg.apply(op_idx, &rhs_arg);
        });
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn tables(clone: &TermClone) -> Vec<Vec<Elem>> {
        clone.operations().into_iter().map(|o| o.table().to_vec()).collect()
    }

    #[test]
    fn pointed_set_clone_is_projections_and_zero() {
        let c = enumerate_term_operations(&corpus::pointed_set(2), 2, DEFAULT_CAP).unwrap();
        assert!(c.is_complete());
        assert_eq!(tables(&c), vec![vec![0, 0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        let c = enumerate_term_operations(&corpus::pointed_set(2), 2, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert!(!c.is_complete());
    }

    #[test]
    fn z2_binary_clone() {
        let c = enumerate_term_operations(&corpus::z2(), 2, 4).unwrap();
        assert!(c.is_complete());
        assert_eq!(c.len(), 4);
        let xor = c.position(&[0, 1, 1, 0]).unwrap();
        assert_eq!(c.term(xor).to_string(), "sub(x0,x1)");
        assert_eq!(c.depth(xor), 1);
        let c = enumerate_term_operations(&corpus::z2(), 2, 3).unwrap();
        assert!(!c.is_complete());
    }

    #[test]
    fn implication_clone_reaches_reverse_implication() {
        let c = enumerate_term_operations(&corpus::implication2(), 2, 16).unwrap();
        assert!(c.is_complete());
        // (x,y) -> (y -> x)
        let i = c.position(&[1, 0, 1, 1]).unwrap();
        assert_eq!(c.term(i).to_string(), "imp(x1,x0)");
    }

    #[test]
    fn size_limits() {
        assert_eq!(
            enumerate_term_operations(&corpus::z2(), 0, 0).unwrap_err(),
            CloneError::ZeroArity
        );
        assert!(matches!(
            enumerate_term_operations(&corpus::z4(), 9, 0),
            Err(CloneError::TableTooLarge { .. })
        ));
    }

    #[test]
    fn witness_terms_reproduce_tables() {
        for alg in corpus::all() {
            let c = enumerate_term_operations(&alg, 2, DEFAULT_CAP).unwrap();
            for i in 0..c.len() {
                assert!(c.operation(i).term_reproduces(&alg), "{}", alg.name());
            }
        }
    }

    #[test]
    fn subtraction_examples() {
        let w = find_subtraction_witnesses(&corpus::z2(), DEFAULT_CAP).unwrap();
        assert_eq!(w.verdict(), Verdict::Yes);
        assert_eq!(w.witnesses.len(), 1);
        assert_eq!(w.witnesses[0].op.table(), &[0, 1, 1, 0]);
        assert!(w.witnesses[0].homomorphic);

        let w = find_subtraction_witnesses(&corpus::pointed_set(3), DEFAULT_CAP).unwrap();
        assert!(w.complete);
        assert_eq!(w.verdict(), Verdict::No);

        let w = find_subtraction_witnesses(&corpus::implication2(), DEFAULT_CAP).unwrap();
        assert_eq!(w.witnesses.len(), 1);
        assert_eq!(w.witnesses[0].op.table(), &[1, 0, 1, 1]);
        assert!(!w.witnesses[0].homomorphic);
    }

    #[test]
    fn maltsev_examples() {
        let w = find_maltsev_witnesses(&corpus::z2(), DEFAULT_CAP).unwrap();
        let xor3 = OperationTable::from_fn(2, 3, |a| a[0] ^ a[1] ^ a[2]);
        assert!(w.witnesses.iter().any(|p| p.table() == xor3.table()));

        let w = find_maltsev_witnesses(&corpus::implication2(), DEFAULT_CAP).unwrap();
        assert!(w.complete);
        assert_eq!(w.verdict(), Verdict::No);

        let w = find_maltsev_witnesses(&corpus::pointed_set(2), DEFAULT_CAP).unwrap();
        assert_eq!(w.verdict(), Verdict::No);
    }

    #[test]
    fn maltsev_to_subtraction_examples() {
        let z2 = corpus::z2();
        let xor3 = OperationTable::from_fn(2, 3, |a| a[0] ^ a[1] ^ a[2]);
        assert_eq!(maltsev_to_subtraction(&xor3, &z2).unwrap().table(), &[0, 1, 1, 0]);

        let z3 = corpus::z3();
        let p = OperationTable::from_fn(3, 3, |a| (a[0] + 3 - a[1] + a[2]) % 3);
        let s = maltsev_to_subtraction(&p, &z3).unwrap();
        assert_eq!(s.table(), z3.operations()[0].table());

        let t = corpus::trivial();
        let p = OperationTable::from_fn(1, 3, |_| 0);
        assert_eq!(maltsev_to_subtraction(&p, &t).unwrap().table(), &[0]);

        let proj = OperationTable::from_fn(2, 3, |a| a[0]);
        assert_eq!(maltsev_to_subtraction(&proj, &z2), Err(CloneError::NotMaltsev));
    }

    #[test]
    fn maltsev_term_substitution_keeps_term() {
        let z2 = corpus::z2();
        let w = find_maltsev_witnesses(&z2, DEFAULT_CAP).unwrap();
        for p in &w.witnesses {
            let s = maltsev_to_subtraction(p, &z2).unwrap();
            assert!(s.term().is_some());
            assert!(s.term_reproduces(&z2));
        }
    }

    #[test]
    fn homomorphic_operation_examples() {
        let z2 = corpus::z2();
        assert!(is_homomorphic_operation(
            &z2,
            &OperationTable::new(2, 2, vec![0, 1, 1, 0])
        ));
        let s3 = corpus::s3();
        let div = OperationTable::from_fn(6, 2, |a| s3.apply(0, &[a[0], s3.apply(1, &[a[1]])]));
        assert!(!is_homomorphic_operation(&s3, &div));
        for alg in corpus::all() {
            let proj = OperationTable::from_fn(alg.size(), 2, |a| a[0]);
            assert!(is_homomorphic_operation(&alg, &proj));
        }
    }
}
