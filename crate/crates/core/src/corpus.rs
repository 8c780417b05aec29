//! Small algebras bundled with the crate.

use crate::algebra::{FiniteAlgebra, Operation};

/// Names accepted by [`by_name`], in listing order.
pub const NAMES: &[&str] = &[
    "trivial",
    "pointed2",
    "pointed3",
    "z2",
    "z3",
    "z4",
    "klein4",
    "s3",
    "implication2",
    "semilattice2",
];

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    Some(match name {
        "trivial" => trivial(),
        "pointed2" => pointed_set(2),
        "pointed3" => pointed_set(3),
        "z2" => z2(),
        "z3" => z3(),
        "z4" => z4(),
        "klein4" => klein4(),
        "s3" => s3(),
        "implication2" => implication2(),
        "semilattice2" => semilattice2(),
        _ => return None,
    })
}

/// Every bundled algebra, in [`NAMES`] order.
pub fn all() -> Vec<FiniteAlgebra> {
    NAMES.iter().map(|n| by_name(n).unwrap()).collect()
}

/// One element, one binary operation.
pub fn trivial() -> FiniteAlgebra {
    FiniteAlgebra::new("trivial", 1, 0, vec![Operation::new("sub", 2, vec![0])]).unwrap()
}

/// A pointed set: no operations besides the base point 0.
pub fn pointed_set(size: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(format!("pointed{size}"), size, 0, vec![]).unwrap()
}

/// The cyclic group of order `n` presented by subtraction alone.
pub fn cyclic(n: usize) -> FiniteAlgebra {
    let sub = Operation::from_fn("sub", 2, n, |a| (a[0] + n - a[1]) % n);
    FiniteAlgebra::new(format!("z{n}"), n, 0, vec![sub]).unwrap()
}

pub fn z2() -> FiniteAlgebra {
    cyclic(2)
}

pub fn z3() -> FiniteAlgebra {
    cyclic(3)
}

pub fn z4() -> FiniteAlgebra {
    cyclic(4)
}

/// `Z2 x Z2` with bitwise xor as subtraction.
pub fn klein4() -> FiniteAlgebra {
    let sub = Operation::from_fn("sub", 2, 4, |a| a[0] ^ a[1]);
    FiniteAlgebra::new("klein4", 4, 0, vec![sub]).unwrap()
}

/// Permutations of {0,1,2} in lexicographic order of their images.
pub const S3_ELEMENTS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// The symmetric group on three letters with `mul`, `inv` and the identity
/// `e` (element 0, the base point). `mul(p, q)` applies `q` first.
pub fn s3() -> FiniteAlgebra {
    let index = |p: [usize; 3]| S3_ELEMENTS.iter().position(|&q| q == p).unwrap();
    let mul = Operation::from_fn("mul", 2, 6, |a| {
        let (p, q) = (S3_ELEMENTS[a[0]], S3_ELEMENTS[a[1]]);
        index([p[q[0]], p[q[1]], p[q[2]]])
    });
    let inv = Operation::from_fn("inv", 1, 6, |a| {
        let p = S3_ELEMENTS[a[0]];
        let mut r = [0; 3];
        for (i, &v) in p.iter().enumerate() {
            r[v] = i;
        }
        index(r)
    });
    let e = Operation::new("e", 0, vec![0]);
    FiniteAlgebra::new("s3", 6, 0, vec![mul, inv, e]).unwrap()
}

/// The two-element implication algebra; the base point is the top element 1.
pub fn implication2() -> FiniteAlgebra {
    let imp = Operation::new("imp", 2, vec![1, 1, 0, 1]);
    FiniteAlgebra::new("implication2", 2, 1, vec![imp]).unwrap()
}

/// The two-element meet-semilattice with its bottom as base point.
pub fn semilattice2() -> FiniteAlgebra {
    let meet = Operation::new("meet", 2, vec![0, 0, 0, 1]);
    FiniteAlgebra::new("semilattice2", 2, 0, vec![meet]).unwrap()
}
