//! Finite pointed algebras and the subtractive / additive question.
//!
//! A pointed algebra is a finite algebra with a designated element `0`. This
//! crate decides, for the variety generated by such an algebra:
//!
//! * whether it is subtractive: some binary term `s` has `s(x,0) = x` and
//!   `s(x,x) = 0` ([`clone::find_subtraction_witnesses`]);
//! * whether it is Mal'tsev ([`clone::find_maltsev_witnesses`]);
//! * whether it is abelian, i.e. has a subtraction term that is a
//!   homomorphism ([`abelian::decide_additivity`]).
//!
//! It also checks relations for closedness under extended matrices
//! ([`matrix`]) and replays, element by element, the argument that turns a
//! subtraction on the image of `A + A -> A x A` into a subtraction algebra
//! structure respected by every homomorphism ([`harness`]).
//!
//! ```
//! use subalg::{abelian, clone, corpus};
//!
//! let z3 = corpus::z3();
//! let search = clone::find_subtraction_witnesses(&z3, clone::DEFAULT_CAP).unwrap();
//! assert_eq!(search.verdict(), clone::Verdict::Yes);
//! assert_eq!(search.witnesses[0].op.term().unwrap().to_string(), "sub(x0,x1)");
//!
//! let additive = abelian::decide_additivity(&z3, clone::DEFAULT_CAP).unwrap();
//! assert_eq!(additive.verdict(), clone::Verdict::Yes);
//! ```
//!
//! The guide in `book/` walks through each module; its code blocks are
//! compiled and run as doctests of this crate.

pub mod abelian;
pub mod algebra;
pub mod clone;
pub mod corpus;
pub mod harness;
pub mod matrix;
pub mod relation;
mod space;
pub mod term;

pub use algebra::{Elem, FiniteAlgebra, Operation};
pub use clone::{OperationTable, SubtractionWitness, Verdict};
pub use matrix::ExtMatrix;
pub use relation::Relation;
pub use space::TupleCodec;
pub use term::Term;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/clones.md")]
    mod clones {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/abelian.md")]
    mod abelian {}
    #[doc = include_str!("../../../book/src/replay.md")]
    mod replay {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
