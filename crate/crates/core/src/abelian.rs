//! Group laws of subtraction operations, abelian group synthesis and the
//! additivity decision.
//!
//! A subtraction `s` obeying the exchange law
//! `s(s(x,y), s(z,t)) = s(s(x,z), s(y,t))` is exactly a subtraction that is
//! a homomorphism of its own reduct `(A, s, 0)`, and it makes `A` an abelian
//! group with `x + y = s(x, s(0, y))` and `-x = s(0, x)`. When such an `s`
//! is a term operation that also commutes with every basic operation, the
//! variety generated by the algebra is abelian.

use std::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra, Operation};
use crate::clone::{
    enumerate_term_operations, is_homomorphic_operation, is_subtraction, subtraction_witnesses, CloneError,
    OperationTable, SubtractionWitness, Verdict,
};
use crate::space::{find_mixed, for_each_mixed, TupleCodec};

/// Largest carrier handled by the constraint-propagated table search.
pub const TABLE_SEARCH_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("operation is not a subtraction: s(a,0) = a and s(a,a) = 0 must hold")]
    NotSubtraction,
    #[error("exchange law fails at (x,y,z,t) = {0:?}")]
    ExchangeFails([Elem; 4]),
    #[error("carrier of size {size} exceeds the table search limit {limit}")]
    SizeBound { size: usize, limit: usize },
    #[error(transparent)]
    Clone(#[from] CloneError),
}

/// `(A, s, 0)` as an algebra with the single operation `sub`.
pub fn subtraction_reduct(alg: &FiniteAlgebra, s: &OperationTable) -> FiniteAlgebra {
    let sub = Operation::new("sub", 2, s.table().to_vec());
    FiniteAlgebra::new(format!("{}/sub", alg.name()), alg.size(), alg.zero(), vec![sub])
        .expect("subtraction table fits the carrier")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeCheck {
    pub holds: bool,
    /// First failing `(x, y, z, t)` in lexicographic order.
    pub counterexample: Option<[Elem; 4]>,
}

fn require_subtraction(alg: &FiniteAlgebra, s: &OperationTable) -> Result<(), AbelianError> {
    if is_subtraction(alg, s) {
        Ok(())
    } else {
        Err(AbelianError::NotSubtraction)
    }
}

/// Exhaustive check of `(x-y)-(z-t) = (x-z)-(y-t)`.
pub fn check_exchange_law(alg: &FiniteAlgebra, s: &OperationTable) -> Result<ExchangeCheck, AbelianError> {
    require_subtraction(alg, s)?;
    let n = alg.size();
    let hit = find_mixed(&[n; 4], |q| {
        let (x, y, z, t) = (q[0], q[1], q[2], q[3]);
        s.apply2(s.apply2(x, y), s.apply2(z, t)) != s.apply2(s.apply2(x, z), s.apply2(y, t))
    });
    Ok(ExchangeCheck {
        holds: hit.is_none(),
        counterexample: hit.map(|q| [q[0], q[1], q[2], q[3]]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupLaw {
    /// The exchange law holds.
    AbelianGroup,
    /// `(x-y)-(z-y) = x-z` holds but the exchange law does not.
    Group,
    BareSubtraction,
}

impl fmt::Display for GroupLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupLaw::AbelianGroup => "abelian-group",
            GroupLaw::Group => "group",
            GroupLaw::BareSubtraction => "bare-subtraction",
        })
    }
}

/// Whether `(x-y)-(z-y) = x-z` holds for all `x, y, z`.
pub fn satisfies_group_axiom(alg: &FiniteAlgebra, s: &OperationTable) -> bool {
    let n = alg.size();
    find_mixed(&[n; 3], |q| {
        s.apply2(s.apply2(q[0], q[1]), s.apply2(q[2], q[1])) != s.apply2(q[0], q[2])
    })
    .is_none()
}

pub fn classify_group_law(alg: &FiniteAlgebra, s: &OperationTable) -> Result<GroupLaw, AbelianError> {
    if check_exchange_law(alg, s)?.holds {
        Ok(GroupLaw::AbelianGroup)
    } else if satisfies_group_axiom(alg, s) {
        Ok(GroupLaw::Group)
    } else {
        Ok(GroupLaw::BareSubtraction)
    }
}

/// Abelian group operations derived from a subtraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianStructure {
    pub plus: OperationTable,
    pub neg: OperationTable,
    pub zero: Elem,
}

/// `x + y = x - (0 - y)` and `-x = 0 - x`.
pub fn synthesize_abelian(alg: &FiniteAlgebra, s: &OperationTable) -> Result<AbelianStructure, AbelianError> {
    let check = check_exchange_law(alg, s)?;
    if let Some(q) = check.counterexample {
        return Err(AbelianError::ExchangeFails(q));
    }
    let z = alg.zero();
    let n = alg.size();
    Ok(AbelianStructure {
        plus: OperationTable::from_fn(n, 2, |a| s.apply2(a[0], s.apply2(z, a[1]))),
        neg: OperationTable::from_fn(n, 1, |a| s.apply2(z, a[0])),
        zero: z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupAxiom {
    Associativity,
    Commutativity,
    Unit,
    Inverse,
    /// `s(x, y) = x + (-y)` for the subtraction the structure came from.
    SubtractionConsistency,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCheck {
    pub ok: bool,
    /// First violated axiom with the elements that violate it.
    pub violation: Option<(GroupAxiom, Vec<Elem>)>,
}

/// An axiom, the number of variables it quantifies over, and its test.
type AxiomCheck<'a> = (GroupAxiom, usize, Box<dyn Fn(&[Elem]) -> bool + 'a>);

/// Exhaustively checks the abelian group axioms on a carrier of `size`
/// elements, and consistency with `subtraction` when given.
pub fn verify_abelian_group(size: usize, g: &AbelianStructure, subtraction: Option<&OperationTable>) -> GroupCheck {
    let plus = |a, b| g.plus.apply2(a, b);
    let neg = |a| g.neg.apply(&[a]);
    let z = g.zero;
    let checks: Vec<AxiomCheck<'_>> = vec![
        (
            GroupAxiom::Associativity,
            3,
            Box::new(|v: &[Elem]| plus(plus(v[0], v[1]), v[2]) == plus(v[0], plus(v[1], v[2]))),
        ),
        (
            GroupAxiom::Commutativity,
            2,
            Box::new(|v: &[Elem]| plus(v[0], v[1]) == plus(v[1], v[0])),
        ),
        (
            GroupAxiom::Unit,
            1,
            Box::new(|v: &[Elem]| plus(v[0], z) == v[0] && plus(z, v[0]) == v[0]),
        ),
        (
            GroupAxiom::Inverse,
            1,
            Box::new(|v: &[Elem]| plus(v[0], neg(v[0])) == z),
        ),
    ];
    for (axiom, arity, holds) in &checks {
        if let Some(v) = find_mixed(&vec![size; *arity], |v| !holds(v)) {
            return GroupCheck {
                ok: false,
                violation: Some((*axiom, v)),
            };
        }
    }
    if let Some(s) = subtraction {
        if let Some(v) = find_mixed(&[size; 2], |v| s.apply2(v[0], v[1]) != plus(v[0], neg(v[1]))) {
            return GroupCheck {
                ok: false,
                violation: Some((GroupAxiom::SubtractionConsistency, v)),
            };
        }
    }
    GroupCheck {
        ok: true,
        violation: None,
    }
}

/// Binary tables `t` with `t(a,0) = a`, `t(a,a) = 0` that are homomorphisms
/// `alg^2 -> alg`, in lexicographic order, at most `limit` of them.
///
/// Backtracks cell by cell; every homomorphism constraint
/// `t(f(x), f(y)) = f(t(x_1,y_1), ..., t(x_m,y_m))` whose right-hand cells
/// are all known forces its left-hand cell.
pub fn homomorphic_subtraction_tables(alg: &FiniteAlgebra, limit: usize) -> Result<Vec<Vec<Elem>>, AbelianError> {
    let n = alg.size();
    if n > TABLE_SEARCH_LIMIT {
        return Err(AbelianError::SizeBound {
            size: n,
            limit: TABLE_SEARCH_LIMIT,
        });
    }
    let mut search = TableSearch::new(alg);
    let mut solutions = Vec::new();
    if search.prefill() {
        search.descend(limit, &mut solutions);
    }
    Ok(solutions)
}

struct Constraint {
    op: usize,
    lhs: usize,
    rhs: Vec<usize>,
}

struct TableSearch<'a> {
    alg: &'a FiniteAlgebra,
    cells: Vec<Option<Elem>>,
    constraints: Vec<Constraint>,
    watchers: Vec<Vec<usize>>,
    trail: Vec<usize>,
    queue: Vec<usize>,
}

impl<'a> TableSearch<'a> {
    fn new(alg: &'a FiniteAlgebra) -> TableSearch<'a> {
        let n = alg.size();
        let mut constraints = Vec::new();
        for (op, o) in alg.operations().iter().enumerate() {
            let m = o.arity();
            let codec = TupleCodec::new(n, m);
            let mut x = vec![0; m];
            let mut y = vec![0; m];
            for_each_mixed(&[codec.len(), codec.len()], |pair| {
                codec.decode_into(pair[0], &mut x);
                codec.decode_into(pair[1], &mut y);
                constraints.push(Constraint {
                    op,
                    lhs: alg.apply(op, &x) * n + alg.apply(op, &y),
                    rhs: x.iter().zip(&y).map(|(&a, &b)| a * n + b).collect(),
                });
            });
        }
        let mut watchers = vec![Vec::new(); n * n];
        for (id, c) in constraints.iter().enumerate() {
            watchers[c.lhs].push(id);
            for &cell in &c.rhs {
                if !watchers[cell].contains(&id) {
                    watchers[cell].push(id);
                }
            }
        }
        TableSearch {
            alg,
            cells: vec![None; n * n],
            constraints,
            watchers,
            trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn assign(&mut self, cell: usize, v: Elem) -> bool {
        match self.cells[cell] {
            Some(old) => old == v,
            None => {
                self.cells[cell] = Some(v);
                self.trail.push(cell);
                self.queue.push(cell);
                true
            }
        }
    }

    fn fire(&mut self, id: usize) -> bool {
        let c = &self.constraints[id];
        let mut args = Vec::with_capacity(c.rhs.len());
        for &cell in &c.rhs {
            match self.cells[cell] {
                Some(v) => args.push(v),
                None => return true,
            }
        }
        let v = self.alg.apply(c.op, &args);
        let lhs = c.lhs;
        self.assign(lhs, v)
    }

    fn propagate(&mut self) -> bool {
        while let Some(cell) = self.queue.pop() {
            for i in 0..self.watchers[cell].len() {
                let id = self.watchers[cell][i];
                if !self.fire(id) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn prefill(&mut self) -> bool {
        let n = self.alg.size();
        let z = self.alg.zero();
        for a in 0..n {
            if !self.assign(a * n + z, a) || !self.assign(a * n + a, z) {
                return false;
            }
        }
        // constraints with no right-hand cells (nullary operations)
        for id in 0..self.constraints.len() {
            if self.constraints[id].rhs.is_empty() && !self.fire(id) {
                return false;
            }
        }
        self.propagate()
    }

    fn undo(&mut self, mark: usize) {
        for cell in self.trail.drain(mark..) {
            self.cells[cell] = None;
        }
    }

    fn descend(&mut self, limit: usize, solutions: &mut Vec<Vec<Elem>>) {
        if solutions.len() >= limit {
            return;
        }
        let Some(cell) = self.cells.iter().position(Option::is_none) else {
            solutions.push(self.cells.iter().map(|c| c.unwrap()).collect());
            return;
        };
        for v in 0..self.alg.size() {
            let mark = self.trail.len();
            if self.assign(cell, v) && self.propagate() {
                self.descend(limit, solutions);
            }
            self.undo(mark);
            if solutions.len() >= limit {
                return;
            }
        }
    }
}

/// True iff `s` is the only homomorphic subtraction on its own reduct.
pub fn unique_homomorphic_subtraction(alg: &FiniteAlgebra, s: &OperationTable) -> Result<bool, AbelianError> {
    let check = check_exchange_law(alg, s)?;
    if let Some(q) = check.counterexample {
        return Err(AbelianError::ExchangeFails(q));
    }
    let reduct = subtraction_reduct(alg, s);
    let found = homomorphic_subtraction_tables(&reduct, 2)?;
    Ok(found.len() == 1 && found[0] == s.table())
}

/// Why additivity was refuted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoReason {
    /// The complete binary clone has no homomorphic subtraction.
    CloneSearchComplete,
    /// The clone search was cut off, but no binary table at all is a
    /// homomorphic subtraction of the algebra.
    NoHomomorphicSubtractionTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Additivity {
    Yes { witness: SubtractionWitness },
    No { reason: NoReason },
    Unknown { cap: usize },
}

impl Additivity {
    pub fn verdict(&self) -> Verdict {
        match self {
            Additivity::Yes { .. } => Verdict::Yes,
            Additivity::No { .. } => Verdict::No,
            Additivity::Unknown { .. } => Verdict::Unknown,
        }
    }
}

/// Decides whether the variety generated by `alg` is abelian, i.e. whether
/// some binary term operation is a homomorphic subtraction.
///
/// First searches the binary clone under `cap`. If that search is cut off
/// without a homomorphic witness and the carrier is small enough, all
/// binary tables are searched instead; finding none refutes additivity.
pub fn decide_additivity(alg: &FiniteAlgebra, cap: usize) -> Result<Additivity, AbelianError> {
    let clone = enumerate_term_operations(alg, 2, cap)?;
    let search = subtraction_witnesses(alg, &clone);
    if let Some(w) = search.witnesses.iter().find(|w| w.homomorphic) {
        return Ok(Additivity::Yes { witness: w.clone() });
    }
    if search.complete {
        return Ok(Additivity::No {
            reason: NoReason::CloneSearchComplete,
        });
    }
    if alg.size() <= TABLE_SEARCH_LIMIT && homomorphic_subtraction_tables(alg, 1)?.is_empty() {
        return Ok(Additivity::No {
            reason: NoReason::NoHomomorphicSubtractionTable,
        });
    }
    Ok(Additivity::Unknown { cap })
}

/// Whether every basic operation of `alg` is additive for `plus`:
/// `f(x + y) = f(x) + f(y)` componentwise.
pub fn operations_respect_plus(alg: &FiniteAlgebra, plus: &OperationTable) -> bool {
    let n = alg.size();
    alg.operations().iter().enumerate().all(|(op, o)| {
        let m = o.arity();
        let codec = TupleCodec::new(n, m);
        let mut x = vec![0; m];
        let mut y = vec![0; m];
        let mut sum = vec![0; m];
        find_mixed(&[codec.len(), codec.len()], |pair| {
            codec.decode_into(pair[0], &mut x);
            codec.decode_into(pair[1], &mut y);
            for j in 0..m {
                sum[j] = plus.apply2(x[j], y[j]);
            }
            alg.apply(op, &sum) != plus.apply2(alg.apply(op, &x), alg.apply(op, &y))
        })
        .is_none()
    })
}

/// Convenience: is the homomorphic flag consistent with a fresh check?
pub fn witness_is_consistent(alg: &FiniteAlgebra, w: &SubtractionWitness) -> bool {
    is_subtraction(alg, &w.op) && w.homomorphic == is_homomorphic_operation(alg, &w.op)
}
