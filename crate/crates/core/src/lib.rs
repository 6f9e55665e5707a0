//! Decision procedures for infinite atomic Boolean algebras enriched with
//! atom-count predicates `C_k`, the finiteness ideal `Fin`, and cardinality
//! congruences `Res(n, r)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`ast`]: Boolean-ring terms, formulas, minterm decomposition.
//! * [`syntax`]: text parser and printer.
//! * [`descriptor`]: per-element count/`Fin`/residue constraints and the
//!   split-projection rules.
//! * [`qe`]: quantifier elimination, sentence decision, equivalence.
//! * [`model`]: eventually periodic subsets of ℕ, used as a computable model
//!   and as an independent oracle.
//! * [`harness`]: axiom instances and definability experiments.

pub mod ast;
pub mod syntax;
pub mod descriptor;
pub mod qe;
pub mod model;
pub mod harness;

pub use ast::{Atom, Card, Formula, Level, Term, Var};
pub use qe::{Theory, Verdict};
