//! Terms, formulas, and the minterm decomposition of atomic constraints.
//!
//! Terms live in Boolean-ring normal form (`+` is symmetric difference, `.`
//! is meet). Lattice syntax is translated at the parser boundary with
//! [`from_lattice`].

mod formula;
mod minterm;
mod term;

pub use formula::{fresh_name, Atom, AtomError, Formula, Level};
pub use minterm::{
    cells_of, decompose, decompose_atom, Card, CellConstraint, DecomposeError, Decomposition,
    Minterm,
};
pub use term::{Monomial, Term, Var};

/// Lattice-syntax terms over `0, 1, ∩, ∪, ¬`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeExpr {
    Zero,
    One,
    Var(Var),
    Meet(Box<LatticeExpr>, Box<LatticeExpr>),
    Join(Box<LatticeExpr>, Box<LatticeExpr>),
    Complement(Box<LatticeExpr>),
}

/// Translates a lattice term into its canonical ring polynomial.
pub fn from_lattice(expr: &LatticeExpr) -> Term {
    match expr {
        LatticeExpr::Zero => Term::zero(),
        LatticeExpr::One => Term::one(),
        LatticeExpr::Var(v) => Term::var(v.clone()),
        LatticeExpr::Meet(a, b) => &from_lattice(a) * &from_lattice(b),
        LatticeExpr::Join(a, b) => from_lattice(a).join(&from_lattice(b)),
        LatticeExpr::Complement(a) => from_lattice(a).complement(),
    }
}

/// Returns the canonical form of a term. Terms are always stored canonically,
/// so this is the identity; it exists for callers that build terms from raw
/// monomials via [`Term::from_monomials`].
pub fn normalize(t: &Term) -> Term {
    Term::from_monomials(t.monomials().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> LatticeExpr {
        LatticeExpr::Var(Var::new(n))
    }

    #[test]
    fn complement_is_one_plus() {
        let t = from_lattice(&LatticeExpr::Complement(Box::new(v("x"))));
        assert_eq!(t, &Term::one() + &Term::var("x"));
    }

    #[test]
    fn join_is_idempotent() {
        let t = from_lattice(&LatticeExpr::Join(Box::new(v("x")), Box::new(v("x"))));
        assert_eq!(t, Term::var("x"));
    }

    #[test]
    fn join_of_variables() {
        let t = from_lattice(&LatticeExpr::Join(Box::new(v("x")), Box::new(v("y"))));
        let x = Term::var("x");
        let y = Term::var("y");
        assert_eq!(t, &(&x + &y) + &(&x * &y));
    }
}
