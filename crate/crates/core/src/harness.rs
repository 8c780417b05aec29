//! Element-wise replay of the argument that a subtraction on the image of
//! `A + A -> A x A` forces that image to be all of `A x A`, and that every
//! homomorphism then commutes with the subtraction.
//!
//! The coproduct itself is never built: its image in `A x A` is the
//! subalgebra `R` generated by the pairs `(a, a)` and `(a, 0)`. The
//! subtraction is taken from a term search, so it is total; only its values
//! on `R` are used.

use std::fmt;

use thiserror::Error;

use crate::algebra::{is_homomorphism, AlgebraError, Elem, FiniteAlgebra};
use crate::clone::{is_homomorphic_operation, is_subtraction, OperationTable};
use crate::matrix::{is_closed, BuiltinMatrix, ClosednessVerdict};
use crate::relation::{generate_relation, Relation};
use crate::space::for_each_mixed;

/// Largest carrier for which all endomorphisms are enumerated (`n^n` maps).
pub const ENDOMORPHISM_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("expected a binary relation, got arity {0}")]
    NotBinary(usize),
    #[error("map is not a homomorphism")]
    NotHomomorphism,
    #[error("{0} is not a homomorphic subtraction")]
    NotHomomorphicSubtraction(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The subalgebra of `A x A` generated by all `(a, a)` and `(a, 0)`.
pub fn compute_r(alg: &FiniteAlgebra) -> Relation {
    let z = alg.zero();
    let gens: Vec<Vec<Elem>> = alg.elements().flat_map(|a| [vec![a, a], vec![a, z]]).collect();
    generate_relation(alg, 2, &gens)
}

/// `(a, b, c) ∈ R'` iff `(b, c) ∈ R` and `(a, s(b, c)) ∈ R`.
pub fn compute_r_prime(alg: &FiniteAlgebra, r: &Relation, s: &OperationTable) -> Result<Relation, HarnessError> {
    if r.arity() != 2 {
        return Err(HarnessError::NotBinary(r.arity()));
    }
    let mut out = Relation::empty(3);
    for_each_mixed(&[alg.size(); 3], |t| {
        let (a, b, c) = (t[0], t[1], t[2]);
        if r.contains(&[b, c]) && r.contains(&[a, s.apply2(b, c)]) {
            out.insert(vec![a, b, c]);
        }
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialCheck {
    pub a: Elem,
    /// `s(a, a) = 0`
    pub diagonal_to_zero: bool,
    /// `s(a, 0) = a`
    pub zero_is_right_unit: bool,
}

/// The four displayed facts for one pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStep {
    pub a: Elem,
    pub b: Elem,
    /// `(a, b, b) ∈ R'`, from `(b, b) ∈ R` and `(a, s(b, b)) = (a, 0) ∈ R`.
    pub abb_in_r_prime: bool,
    /// `(0, 0, b) ∈ R'`, from `(0, b) ∈ R` and `(0, s(0, b)) ∈ R`.
    pub zzb_in_r_prime: bool,
    /// `(a, b, 0) ∈ R'`, by closedness under the three-column matrix.
    pub ab0_in_r_prime: bool,
    /// `(a, b) = (a, s(b, 0)) ∈ R`.
    pub ab_in_r: bool,
}

impl ChainStep {
    pub fn holds(&self) -> bool {
        self.abb_in_r_prime && self.zzb_in_r_prime && self.ab0_in_r_prime && self.ab_in_r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportResult {
    /// An endomorphism, as the list of images of `0..n`.
    pub map: Vec<Elem>,
    /// `f(s(a, b)) = s(f(a), f(b))` for all `a, b`.
    pub commutes: bool,
}

/// The stages of the replay, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofStep {
    SubtractionIdentities,
    RPrimeClosed,
    ImplicationChain,
    RFull,
    /// `R` is full but no subtraction was supplied.
    MissingWitness,
    Transport,
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofStep::SubtractionIdentities => "subtraction identities on R",
            ProofStep::RPrimeClosed => "R' closed under proof3",
            ProofStep::ImplicationChain => "implication chain",
            ProofStep::RFull => "R = A x A",
            ProofStep::MissingWitness => "subtraction witness",
            ProofStep::Transport => "homomorphism transport",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTranscript {
    pub r: Relation,
    pub r_full: bool,
    /// Whether `(0, a) ∈ R` for every `a`; this needs subtractivity.
    pub zero_first_in_r: bool,
    pub s_partial_checks: Vec<PartialCheck>,
    pub r_prime: Option<Relation>,
    pub r_prime_closed: Option<ClosednessVerdict>,
    /// One entry per pair `(a, b)`, present only when `R'` is closed.
    pub chain_steps: Vec<ChainStep>,
    /// One entry per endomorphism, when a subtraction was supplied and the
    /// carrier is at most [`ENDOMORPHISM_LIMIT`].
    pub transport_checks: Vec<TransportResult>,
    witness: bool,
}

impl ProofTranscript {
    /// The first stage that fails, if any.
    pub fn breaking_step(&self) -> Option<ProofStep> {
        if !self.witness {
            return Some(if self.r_full {
                ProofStep::MissingWitness
            } else {
                ProofStep::RFull
            });
        }
        if !self
            .s_partial_checks
            .iter()
            .all(|c| c.diagonal_to_zero && c.zero_is_right_unit)
        {
            return Some(ProofStep::SubtractionIdentities);
        }
        if !self.r_prime_closed.as_ref().is_some_and(|v| v.closed) {
            return Some(ProofStep::RPrimeClosed);
        }
        if !self.chain_steps.iter().all(ChainStep::holds) {
            return Some(ProofStep::ImplicationChain);
        }
        if !self.r_full {
            return Some(ProofStep::RFull);
        }
        if !self.transport_checks.iter().all(|t| t.commutes) {
            return Some(ProofStep::Transport);
        }
        None
    }

    pub fn passed(&self) -> bool {
        self.breaking_step().is_none()
    }
}

/// Replays the argument on `alg` with subtraction `s`, recording every
/// stage. Without `s` only `R` is computed.
pub fn replay_proof(alg: &FiniteAlgebra, s: Option<&OperationTable>) -> ProofTranscript {
    let n = alg.size();
    let z = alg.zero();
    let r = compute_r(alg);
    let r_full = r.len() == n * n;
    let zero_first_in_r = alg.elements().all(|a| r.contains(&[z, a]));
    let mut transcript = ProofTranscript {
        r,
        r_full,
        zero_first_in_r,
        s_partial_checks: Vec::new(),
        r_prime: None,
        r_prime_closed: None,
        chain_steps: Vec::new(),
        transport_checks: Vec::new(),
        witness: s.is_some(),
    };
    let Some(s) = s else {
        return transcript;
    };

    transcript.s_partial_checks = alg
        .elements()
        .map(|a| PartialCheck {
            a,
            diagonal_to_zero: s.apply2(a, a) == z,
            zero_is_right_unit: s.apply2(a, z) == a,
        })
        .collect();

    let r_prime = compute_r_prime(alg, &transcript.r, s).expect("R is binary");
    let verdict = is_closed(alg, &r_prime, &BuiltinMatrix::Proof3.matrix()).expect("R' is ternary");
    if verdict.closed {
        let r = &transcript.r;
        transcript.chain_steps = alg
            .elements()
            .flat_map(|a| alg.elements().map(move |b| (a, b)))
            .map(|(a, b)| ChainStep {
                a,
                b,
                abb_in_r_prime: r.contains(&[b, b]) && r.contains(&[a, s.apply2(b, b)]) && r_prime.contains(&[a, b, b]),
                zzb_in_r_prime: r.contains(&[z, b]) && r.contains(&[z, s.apply2(z, b)]) && r_prime.contains(&[z, z, b]),
                ab0_in_r_prime: r_prime.contains(&[a, b, z]),
                ab_in_r: s.apply2(b, z) == b && r.contains(&[a, s.apply2(b, z)]),
            })
            .collect();
    }
    transcript.r_prime = Some(r_prime);
    transcript.r_prime_closed = Some(verdict);

    if n <= ENDOMORPHISM_LIMIT {
        for_each_mixed(&vec![n; n], |f| {
            if is_homomorphism(alg, alg, f).unwrap_or(false) {
                transcript.transport_checks.push(TransportResult {
                    map: f.to_vec(),
                    commutes: commutes_with(f, s, s, n),
                });
            }
        });
    }
    transcript
}

fn commutes_with(f: &[Elem], s: &OperationTable, s2: &OperationTable, n: usize) -> bool {
    (0..n).all(|a| (0..n).all(|b| f[s.apply2(a, b)] == s2.apply2(f[a], f[b])))
}

/// Whether the homomorphism `f: A -> A'` satisfies
/// `f(s(a, b)) = s'(f(a), f(b))`.
pub fn transport_check(
    alg: &FiniteAlgebra,
    alg2: &FiniteAlgebra,
    f: &[Elem],
    s: &OperationTable,
    s2: &OperationTable,
) -> Result<bool, HarnessError> {
    if !is_homomorphism(alg, alg2, f)? {
        return Err(HarnessError::NotHomomorphism);
    }
    if !is_subtraction(alg, s) || !is_homomorphic_operation(alg, s) {
        return Err(HarnessError::NotHomomorphicSubtraction("source subtraction"));
    }
    if !is_subtraction(alg2, s2) || !is_homomorphic_operation(alg2, s2) {
        return Err(HarnessError::NotHomomorphicSubtraction("target subtraction"));
    }
    Ok(commutes_with(f, s, s2, alg.size()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn sub_of(alg: &FiniteAlgebra) -> OperationTable {
        OperationTable::new(alg.size(), 2, alg.operations()[0].table().to_vec())
    }

    #[test]
    fn r_examples() {
        assert_eq!(compute_r(&corpus::z2()), Relation::full(2, 2));
        assert_eq!(compute_r(&corpus::z3()), Relation::full(3, 2));
        let p2 = compute_r(&corpus::pointed_set(2));
        assert_eq!(p2, Relation::new(2, vec![vec![0, 0], vec![1, 1], vec![1, 0]]).unwrap());
    }

    #[test]
    fn r_prime_examples() {
        let z2 = corpus::z2();
        let s = sub_of(&z2);
        assert_eq!(
            compute_r_prime(&z2, &Relation::full(2, 2), &s).unwrap(),
            Relation::full(2, 3)
        );
        let zero = Relation::new(2, vec![vec![0, 0]]).unwrap();
        assert_eq!(
            compute_r_prime(&z2, &zero, &s).unwrap(),
            Relation::new(3, vec![vec![0, 0, 0]]).unwrap()
        );
        let z3 = corpus::z3();
        assert_eq!(
            compute_r_prime(&z3, &Relation::full(3, 2), &sub_of(&z3)).unwrap().len(),
            27
        );
        assert_eq!(
            compute_r_prime(&z2, &Relation::full(2, 3), &s),
            Err(HarnessError::NotBinary(3))
        );
    }

    #[test]
    fn replay_on_groups() {
        for alg in [corpus::z2(), corpus::z3(), corpus::z4(), corpus::klein4()] {
            let t = replay_proof(&alg, Some(&sub_of(&alg)));
            assert!(t.passed(), "{}: {:?}", alg.name(), t.breaking_step());
            assert!(t.r_full && t.zero_first_in_r);
            assert_eq!(t.chain_steps.len(), alg.size() * alg.size());
            assert!(!t.transport_checks.is_empty());
        }
    }

    #[test]
    fn replay_without_witness_breaks_at_r() {
        let t = replay_proof(&corpus::pointed_set(2), None);
        assert_eq!(t.breaking_step(), Some(ProofStep::RFull));
        assert!(!t.zero_first_in_r);
    }

    #[test]
    fn replay_with_bogus_subtraction() {
        let p2 = corpus::pointed_set(2);
        let proj = OperationTable::from_fn(2, 2, |a| a[0]);
        let t = replay_proof(&p2, Some(&proj));
        assert_eq!(t.breaking_step(), Some(ProofStep::SubtractionIdentities));
    }

    #[test]
    fn transport_examples() {
        let (z4, z2, z3) = (corpus::z4(), corpus::z2(), corpus::z3());
        assert_eq!(
            transport_check(&z4, &z2, &[0, 1, 0, 1], &sub_of(&z4), &sub_of(&z2)),
            Ok(true)
        );
        assert_eq!(transport_check(&z2, &z2, &[0, 1], &sub_of(&z2), &sub_of(&z2)), Ok(true));
        assert_eq!(
            transport_check(&z3, &z3, &[0, 2, 1], &sub_of(&z3), &sub_of(&z3)),
            Ok(true)
        );
        assert_eq!(
            transport_check(&z4, &z2, &[0, 1, 1, 0], &sub_of(&z4), &sub_of(&z2)),
            Err(HarnessError::NotHomomorphism)
        );
        let proj = OperationTable::from_fn(2, 2, |a| a[0]);
        assert!(matches!(
            transport_check(&z2, &z2, &[0, 1], &proj, &sub_of(&z2)),
            Err(HarnessError::NotHomomorphicSubtraction(_))
        ));
    }
}
