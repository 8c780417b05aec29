//! Finite relations on a carrier and compatibility with an algebra.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra, PowerSpace};
use crate::space::{for_each_mixed, generate, TupleCodec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("relation arity must be positive")]
    ZeroArity,
    #[error("tuple {index} has length {found}, expected {expected}")]
    Ragged {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("tuple {index} holds {value}, out of range for size {size}")]
    OutOfRange { index: usize, value: Elem, size: usize },
}

/// A set of `arity`-tuples, kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<Elem>>,
}

impl Relation {
    pub fn new<I>(arity: usize, tuples: I) -> Result<Relation, RelationError>
    where
        I: IntoIterator<Item = Vec<Elem>>,
    {
        if arity == 0 {
            return Err(RelationError::ZeroArity);
        }
        let mut set = BTreeSet::new();
        for (index, t) in tuples.into_iter().enumerate() {
            if t.len() != arity {
                return Err(RelationError::Ragged {
                    index,
                    expected: arity,
                    found: t.len(),
                });
            }
            set.insert(t);
        }
        Ok(Relation { arity, tuples: set })
    }

    pub fn empty(arity: usize) -> Relation {
        assert!(arity > 0, "relation arity must be positive");
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// All `arity`-tuples over a carrier of `size` elements.
    pub fn full(size: usize, arity: usize) -> Relation {
        let codec = TupleCodec::new(size, arity);
        Relation::from_codes(&codec, 0..codec.len())
    }

    pub(crate) fn from_codes<I: IntoIterator<Item = usize>>(codec: &TupleCodec, codes: I) -> Relation {
        Relation {
            arity: codec.arity(),
            tuples: codes.into_iter().map(|c| codec.decode(c)).collect(),
        }
    }

    pub(crate) fn from_mask(codec: &TupleCodec, mask: &[bool]) -> Relation {
        Relation::from_codes(codec, mask.iter().enumerate().filter(|(_, &m)| m).map(|(c, _)| c))
    }

    /// Membership bitmap indexed by [`TupleCodec`] codes.
    pub(crate) fn mask(&self, codec: &TupleCodec) -> Vec<bool> {
        let mut mask = vec![false; codec.len()];
        for t in &self.tuples {
            mask[codec.encode(t)] = true;
        }
        mask
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn insert(&mut self, tuple: Vec<Elem>) -> bool {
        assert_eq!(tuple.len(), self.arity, "tuple length must match arity");
        self.tuples.insert(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Elem>> + '_ {
        self.tuples.iter()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.is_subset(&other.tuples)
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        Relation {
            arity: self.arity,
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        }
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        Relation {
            arity: self.arity,
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        }
    }

    /// Checks every entry against a carrier of `size` elements.
    pub fn check_range(&self, size: usize) -> Result<(), RelationError> {
        for (index, t) in self.tuples.iter().enumerate() {
            if let Some(&value) = t.iter().find(|&&v| v >= size) {
                return Err(RelationError::OutOfRange { index, value, size });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, v) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// True iff `rel` is a subuniverse of `alg^k` that contains the zero tuple.
pub fn is_compatible_relation(alg: &FiniteAlgebra, rel: &Relation) -> bool {
    if rel.check_range(alg.size()).is_err() {
        return false;
    }
    let codec = TupleCodec::new(alg.size(), rel.arity());
    let mask = rel.mask(&codec);
    if !mask[codec.encode(&vec![alg.zero(); rel.arity()])] {
        return false;
    }
    let tuples: Vec<&Vec<Elem>> = rel.iter().collect();
    let k = rel.arity();
    let mut column = Vec::new();
    let mut image = vec![0; k];
    for (op_idx, op) in alg.operations().iter().enumerate() {
        let m = op.arity();
        let mut closed = true;
        for_each_mixed(&vec![tuples.len(); m], |picks| {
            if !closed {
                return;
            }
            for (c, slot) in image.iter_mut().enumerate() {
                column.clear();
                column.extend(picks.iter().map(|&p| tuples[p][c]));
                *slot = alg.apply(op_idx, &column);
            }
            closed = mask[codec.encode(&image)];
        });
        // nullary operations have no picks to range over
        if m == 0 {
            let c = alg.apply(op_idx, &[]);
            closed = mask[codec.encode(&vec![c; k])];
        }
        if !closed {
            return false;
        }
    }
    true
}

/// The compatible relation generated by `generators`: the subuniverse of
/// `alg^k` containing them and the zero tuple.
pub fn generate_relation(alg: &FiniteAlgebra, k: usize, generators: &[Vec<Elem>]) -> Relation {
    let space = PowerSpace::new(alg, k);
    let codec = *space.codec();
    let mut seeds = vec![codec.encode(&vec![alg.zero(); k])];
    seeds.extend(generators.iter().map(|g| codec.encode(g)));
    Relation::from_codes(&codec, generate(&space, &[], &seeds))
}

/// Enumeration of compatible relations stops with an error once more than
/// this many have been found.
pub const MAX_COMPATIBLE_RELATIONS: usize = 100_000;

/// Every compatible `k`-ary relation of `alg`, ordered by size and then
/// lexicographically. Fails if `size^k` exceeds `limit` or if there are
/// more than [`MAX_COMPATIBLE_RELATIONS`] of them.
///
/// Each subuniverse of a finite power is reached from the least one by
/// adjoining one generator at a time, so this is exhaustive. Since
/// `Sg(S ∪ {a}) = Sg(S ∪ Sg{a})`, only one point per distinct one-generated
/// subuniverse needs to be tried.
pub fn compatible_relations(
    alg: &FiniteAlgebra,
    k: usize,
    limit: usize,
) -> Result<Vec<Relation>, crate::algebra::AlgebraError> {
    let power = crate::algebra::power_algebra(alg, k, limit)?;
    let codec = TupleCodec::new(alg.size(), k);
    let bottom = generate(&power, &[], &[power.zero()]);
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut queue = VecDeque::new();
    let to_mask = |members: &[usize]| {
        let mut mask = vec![false; codec.len()];
        for &p in members {
            mask[p] = true;
        }
        mask
    };
    let mut principal: HashSet<Vec<bool>> = HashSet::new();
    let representatives: Vec<usize> = (0..codec.len())
        .filter(|&p| principal.insert(to_mask(&generate(&power, &bottom, &[p]))))
        .collect();
    seen.insert(to_mask(&bottom));
    queue.push_back(bottom);
    let mut found = Vec::new();
    while let Some(members) = queue.pop_front() {
        let mask = to_mask(&members);
        for &extra in representatives.iter().filter(|&&p| !mask[p]) {
            let next = generate(&power, &members, &[extra]);
            let next_mask = to_mask(&next);
            if seen.insert(next_mask) {
                if seen.len() > MAX_COMPATIBLE_RELATIONS {
                    return Err(crate::algebra::AlgebraError::TooManySubuniverses {
                        size: alg.size(),
                        k,
                        limit: MAX_COMPATIBLE_RELATIONS,
                    });
                }
                queue.push_back(next);
            }
        }
        found.push(Relation::from_mask(&codec, &mask));
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(found)
}
