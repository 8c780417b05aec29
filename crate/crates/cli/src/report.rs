//! Serializable results, shared by the text and JSON renderers.

use serde::{Deserialize, Serialize};
use subalg::abelian::{synthesize_abelian, Additivity, NoReason};
use subalg::clone::{TermClone, WitnessSearch};
use subalg::harness::ProofTranscript;
use subalg::matrix::{ClosednessVerdict, Counterexample};
use subalg::{Elem, OperationTable, Relation, SubtractionWitness, Verdict};

use crate::files::AlgebraDoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictDoc {
    Yes,
    No,
    Unknown,
}

impl From<Verdict> for VerdictDoc {
    fn from(v: Verdict) -> VerdictDoc {
        match v {
            Verdict::Yes => VerdictDoc::Yes,
            Verdict::No => VerdictDoc::No,
            Verdict::Unknown => VerdictDoc::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub term: Option<String>,
    pub table: Vec<Elem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homomorphic: Option<bool>,
}

impl WitnessDoc {
    pub fn from_table(op: &OperationTable) -> WitnessDoc {
        WitnessDoc {
            term: op.term().map(ToString::to_string),
            table: op.table().to_vec(),
            homomorphic: None,
        }
    }

    pub fn from_subtraction(w: &SubtractionWitness) -> WitnessDoc {
        WitnessDoc {
            homomorphic: Some(w.homomorphic),
            ..WitnessDoc::from_table(&w.op)
        }
    }
}

/// Outcome of a bounded search over a term clone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDoc {
    pub verdict: VerdictDoc,
    pub complete: bool,
    /// Number of term operations enumerated.
    pub examined: usize,
    pub cap: usize,
    pub witnesses: Vec<WitnessDoc>,
    /// The enumerated clone as term texts, when it is small.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clone: Option<Vec<String>>,
}

/// Clones up to this many operations are listed in full.
pub const CLONE_LISTING_LIMIT: usize = 16;

impl SearchDoc {
    pub fn subtraction(search: &WitnessSearch<SubtractionWitness>, clone: &TermClone) -> SearchDoc {
        let listing = (clone.len() <= CLONE_LISTING_LIMIT).then(|| {
            clone
                .sorted_indices()
                .into_iter()
                .map(|i| clone.term(i).to_string())
                .collect()
        });
        SearchDoc {
            verdict: search.verdict().into(),
            complete: search.complete,
            examined: search.examined,
            cap: search.cap,
            witnesses: search.witnesses.iter().map(WitnessDoc::from_subtraction).collect(),
            clone: listing,
        }
    }

    pub fn maltsev(search: &WitnessSearch<OperationTable>) -> SearchDoc {
        SearchDoc {
            verdict: search.verdict().into(),
            complete: search.complete,
            examined: search.examined,
            cap: search.cap,
            witnesses: search.witnesses.iter().map(WitnessDoc::from_table).collect(),
            clone: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveDoc {
    pub verdict: VerdictDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    /// `x + y = s(x, s(0, y))`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus: Option<Vec<Elem>>,
    /// `-x = s(0, x)`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neg: Option<Vec<Elem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Present when the verdict is unknown: the cap that was hit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

pub fn no_reason_text(r: NoReason) -> &'static str {
    match r {
        NoReason::CloneSearchComplete => "the complete binary clone has no homomorphic subtraction",
        NoReason::NoHomomorphicSubtractionTable => "no binary table is a homomorphic subtraction",
    }
}

impl AdditiveDoc {
    pub fn new(alg: &subalg::FiniteAlgebra, a: &Additivity) -> AdditiveDoc {
        let mut doc = AdditiveDoc {
            verdict: a.verdict().into(),
            witness: None,
            plus: None,
            neg: None,
            reason: None,
            cap: None,
        };
        match a {
            Additivity::Yes { witness } => {
                doc.witness = Some(WitnessDoc::from_subtraction(witness));
                if let Ok(g) = synthesize_abelian(alg, &witness.op) {
                    doc.plus = Some(g.plus.table().to_vec());
                    doc.neg = Some(g.neg.table().to_vec());
                }
            }
            Additivity::No { reason } => doc.reason = Some(no_reason_text(*reason).to_owned()),
            Additivity::Unknown { cap } => doc.cap = Some(*cap),
        }
        doc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentDoc {
    pub var: String,
    pub value: Elem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub assignment: Vec<AssignmentDoc>,
    pub premises: Vec<Vec<Elem>>,
    pub missing: Vec<Elem>,
}

impl From<&Counterexample> for CounterexampleDoc {
    fn from(c: &Counterexample) -> CounterexampleDoc {
        CounterexampleDoc {
            assignment: c
                .assignment
                .iter()
                .map(|(var, value)| AssignmentDoc {
                    var: var.clone(),
                    value: *value,
                })
                .collect(),
            premises: c.premises.clone(),
            missing: c.missing.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedDoc {
    pub matrix: String,
    pub closed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleDoc>,
}

impl ClosedDoc {
    pub fn new(matrix: &str, v: &ClosednessVerdict) -> ClosedDoc {
        ClosedDoc {
            matrix: matrix.to_owned(),
            closed: v.closed,
            counterexample: v.counterexample.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepFailureDoc {
    pub relation: Vec<Vec<Elem>>,
    pub counterexample: CounterexampleDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub matrix: String,
    pub arity: usize,
    /// Number of compatible relations checked; absent when skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<usize>,
    #[serde(default)]
    pub failures: Vec<SweepFailureDoc>,
    /// Why the sweep was not run (a size bound).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl SweepDoc {
    pub fn new(matrix: &str, arity: usize, results: &[(Relation, ClosednessVerdict)]) -> SweepDoc {
        let failures = results
            .iter()
            .filter_map(|(r, v)| {
                v.counterexample.as_ref().map(|c| SweepFailureDoc {
                    relation: r.iter().cloned().collect(),
                    counterexample: c.into(),
                })
            })
            .collect::<Vec<_>>();
        SweepDoc {
            matrix: matrix.to_owned(),
            arity,
            relations: Some(results.len()),
            closed: Some(results.len() - failures.len()),
            failures,
            skipped: None,
        }
    }

    pub fn skipped(matrix: &str, arity: usize, why: String) -> SweepDoc {
        SweepDoc {
            matrix: matrix.to_owned(),
            arity,
            relations: None,
            closed: None,
            failures: Vec::new(),
            skipped: Some(why),
        }
    }

    pub fn all_closed(&self) -> bool {
        self.skipped.is_none() && self.failures.is_empty()
    }
}

/// Summary of a proof replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofDoc {
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breaking_step: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    pub r_size: usize,
    pub r_full: bool,
    pub zero_first_in_r: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_prime_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_prime_closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_prime_counterexample: Option<CounterexampleDoc>,
    pub chain_steps: usize,
    pub chain_holds: usize,
    pub transport_checks: usize,
    pub transport_commutes: usize,
}

impl ProofDoc {
    pub fn new(t: &ProofTranscript, witness: Option<&OperationTable>) -> ProofDoc {
        ProofDoc {
            passed: t.passed(),
            breaking_step: t.breaking_step().map(|s| s.to_string()),
            witness: witness.map(WitnessDoc::from_table),
            r_size: t.r.len(),
            r_full: t.r_full,
            zero_first_in_r: t.zero_first_in_r,
            r_prime_size: t.r_prime.as_ref().map(Relation::len),
            r_prime_closed: t.r_prime_closed.as_ref().map(|v| v.closed),
            r_prime_counterexample: t
                .r_prime_closed
                .as_ref()
                .and_then(|v| v.counterexample.as_ref())
                .map(Into::into),
            chain_steps: t.chain_steps.len(),
            chain_holds: t.chain_steps.iter().filter(|c| c.holds()).count(),
            transport_checks: t.transport_checks.len(),
            transport_commutes: t.transport_checks.iter().filter(|c| c.commutes).count(),
        }
    }
}

/// Everything `report` computes about one algebra.
///
/// The algebra itself is embedded, so a saved report can be re-checked by
/// rebuilding the algebra and re-running the searches with the same cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub name: String,
    pub algebra: AlgebraDoc,
    pub cap: usize,
    pub subtractive: SearchDoc,
    pub maltsev: SearchDoc,
    pub additive: AdditiveDoc,
    pub proof: ProofDoc,
    pub sweeps: Vec<SweepDoc>,
    pub elapsed_ms: u64,
}
