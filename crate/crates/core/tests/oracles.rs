//! Independent oracles checked against the library's fast paths.

use std::collections::BTreeSet;

use subalg::clone::{enumerate_term_operations, find_maltsev_witnesses, find_subtraction_witnesses, DEFAULT_CAP};
use subalg::harness::compute_r_prime;
use subalg::matrix::{builtin_matrix, is_closed};
use subalg::{corpus, Elem, FiniteAlgebra, OperationTable, Relation, Term};

/// Every binary table of `alg` that some term of depth at most `depth`
/// denotes, found by building terms explicitly and evaluating them.
fn definable_by_terms(alg: &FiniteAlgebra, k: usize, depth: usize) -> BTreeSet<Vec<Elem>> {
    let table_of = |t: &Term| OperationTable::from_term(alg, k, t.clone()).unwrap().table().to_vec();
    let mut reps: Vec<(Vec<Elem>, Term)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut leaves: Vec<Term> = (0..k).map(Term::Var).collect();
    leaves.push(Term::Zero);
    for t in leaves {
        if seen.insert(table_of(&t)) {
            reps.push((table_of(&t), t));
        }
    }
    for _ in 0..depth {
        let terms: Vec<Term> = reps.iter().map(|(_, t)| t.clone()).collect();
        let mut next = Vec::new();
        for op in alg.operations() {
            let m = op.arity();
            let mut idx = vec![0usize; m];
            loop {
                let t = Term::app(op.name(), idx.iter().map(|&i| terms[i].clone()).collect());
                let tab = table_of(&t);
                if seen.insert(tab.clone()) {
                    next.push((tab, t));
                }
                // odometer
                let mut p = m;
                loop {
                    if p == 0 {
                        break;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < terms.len() {
                        break;
                    }
                    idx[p] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        reps.extend(next);
    }
    seen
}

/// All `n^(n^k)` tables, filtered by term-definability.
fn brute_force_clone(alg: &FiniteAlgebra, k: usize, depth: usize) -> BTreeSet<Vec<Elem>> {
    let n = alg.size();
    let cells = n.pow(k as u32);
    let definable = definable_by_terms(alg, k, depth);
    let mut out = BTreeSet::new();
    let mut table = vec![0; cells];
    loop {
        if definable.contains(&table) {
            out.insert(table.clone());
        }
        let mut p = cells;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            table[p] += 1;
            if table[p] < n {
                break;
            }
            table[p] = 0;
        }
    }
}

#[test]
fn clone_enumeration_matches_brute_force() {
    let algebras = [
        corpus::trivial(),
        corpus::pointed_set(2),
        corpus::pointed_set(3),
        corpus::z2(),
        corpus::z3(),
        corpus::implication2(),
        corpus::semilattice2(),
    ];
    for alg in &algebras {
        for k in 1..=2 {
            let clone = enumerate_term_operations(alg, k, DEFAULT_CAP).unwrap();
            assert!(clone.is_complete());
            let fast: BTreeSet<Vec<Elem>> = clone.operations().iter().map(|o| o.table().to_vec()).collect();
            assert_eq!(fast, brute_force_clone(alg, k, 6), "{} k={k}", alg.name());
        }
    }
}

#[test]
fn witness_terms_are_shortest() {
    for alg in corpus::all() {
        if alg.size() > 4 {
            continue;
        }
        let clone = enumerate_term_operations(&alg, 2, DEFAULT_CAP).unwrap();
        let mut by_depth = vec![definable_by_terms(&alg, 2, 0)];
        for d in 1..=6 {
            by_depth.push(definable_by_terms(&alg, 2, d));
        }
        for i in 0..clone.len() {
            let table = clone.table(i);
            let least = by_depth.iter().position(|s| s.contains(&table)).unwrap();
            assert_eq!(clone.depth(i), least, "{}", alg.name());
            assert_eq!(clone.term(i).depth(), least);
        }
    }
}

#[test]
fn maltsev_witnesses_yield_listed_subtractions() {
    for alg in corpus::all() {
        let subs = find_subtraction_witnesses(&alg, DEFAULT_CAP).unwrap();
        assert!(subs.complete);
        let maltsev = find_maltsev_witnesses(&alg, DEFAULT_CAP).unwrap();
        for p in &maltsev.witnesses {
            let s = subalg::clone::maltsev_to_subtraction(p, &alg).unwrap();
            assert!(
                subs.witnesses.iter().any(|w| w.op.table() == s.table()),
                "{}",
                alg.name()
            );
        }
    }
}

#[test]
fn subtraction_values_stay_in_generated_subalgebra() {
    for alg in corpus::all() {
        let subs = find_subtraction_witnesses(&alg, DEFAULT_CAP).unwrap();
        for w in &subs.witnesses {
            for a in alg.elements() {
                for b in alg.elements() {
                    let gens: BTreeSet<Elem> = [a, b].into_iter().collect();
                    let sub = subalg::algebra::subalgebra_closure(&alg, &gens);
                    assert!(sub.contains(&w.op.apply2(a, b)));
                }
            }
        }
    }
}

/// The implication for `proof3` written out directly.
fn proof3_oracle(alg: &FiniteAlgebra, r: &Relation) -> bool {
    let z = alg.zero();
    for x in alg.elements() {
        for y in alg.elements() {
            if r.contains(&[x, y, y]) && r.contains(&[z, z, y]) && !r.contains(&[x, y, z]) {
                return false;
            }
        }
    }
    true
}

#[test]
fn proof3_closedness_matches_nested_loops() {
    let proof3 = builtin_matrix("proof3").unwrap();
    for alg in corpus::all().into_iter().filter(|a| a.size() <= 4) {
        let r = subalg::harness::compute_r(&alg);
        let subs = find_subtraction_witnesses(&alg, DEFAULT_CAP).unwrap();
        let mut candidates: Vec<OperationTable> = subs.witnesses.into_iter().map(|w| w.op).collect();
        candidates.push(OperationTable::from_fn(alg.size(), 2, |a| a[0]));
        candidates.push(OperationTable::from_fn(alg.size(), 2, |a| a[1]));
        for s in &candidates {
            let rp = compute_r_prime(&alg, &r, s).unwrap();
            assert_eq!(is_closed(&alg, &rp, &proof3).unwrap().closed, proof3_oracle(&alg, &rp));
        }
        // also arbitrary ternary relations on the 2-element carriers
        if alg.size() == 2 {
            for bits in 0u32..256 {
                let tuples = (0..8)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1]);
                let rel = Relation::new(3, tuples).unwrap();
                assert_eq!(
                    is_closed(&alg, &rel, &proof3).unwrap().closed,
                    proof3_oracle(&alg, &rel)
                );
            }
        }
    }
}
