use crate::ast::{Atom, Card, Formula, Term};

use super::{Count, Descriptor, FinStatus, Residue};

/// A descriptor asserted of a term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub term: Term,
    pub descriptor: Descriptor,
}

impl Literal {
    pub fn new(term: Term, descriptor: Descriptor) -> Literal {
        Literal { term, descriptor }
    }

    pub fn to_formula(&self) -> Formula {
        self.descriptor.to_formula(&self.term)
    }
}

/// A disjunction of conjunctions of literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub disjuncts: Vec<Vec<Literal>>,
}

impl Condition {
    pub fn single(term: &Term, d: Descriptor) -> Condition {
        Condition {
            disjuncts: vec![vec![Literal::new(term.clone(), d)]],
        }
    }

    pub fn any(term: &Term, ds: impl IntoIterator<Item = Descriptor>) -> Condition {
        Condition {
            disjuncts: ds
                .into_iter()
                .map(|d| vec![Literal::new(term.clone(), d)])
                .collect(),
        }
    }

    /// Evaluates the condition given the cardinality of each literal's term.
    pub fn holds(&self, card: &dyn Fn(&Term) -> Card) -> bool {
        self.disjuncts
            .iter()
            .any(|conj| conj.iter().all(|l| l.descriptor.admits(card(&l.term))))
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or_all(
            self.disjuncts
                .iter()
                .map(|conj| Formula::and_all(conj.iter().map(Literal::to_formula))),
        )
    }
}

/// An atom as a descriptor literal.
pub fn atom_condition(atom: &Atom) -> Condition {
    let t = atom.term();
    let d = match atom {
        Atom::IsZero(_) => Descriptor::exact(0),
        Atom::AtLeast(k, _) => Descriptor::at_least(*k as u64),
        Atom::Fin(_) => Descriptor::must_fin(),
        Atom::Res {
            modulus, residue, ..
        } => Descriptor::residues(*modulus as u64, [*residue as u64]),
    };
    Condition::single(t, d)
}

/// The negation of an atom as a disjunction of descriptor literals: below
/// `k` means one of the exact counts `0..k`, and a failed residue means
/// either non-finite or another residue.
pub fn negate_atom(atom: &Atom) -> Condition {
    let t = atom.term();
    match atom {
        Atom::IsZero(_) => Condition::single(t, Descriptor::at_least(1)),
        Atom::AtLeast(k, _) => Condition::any(t, (0..*k as u64).map(Descriptor::exact)),
        Atom::Fin(_) => Condition::single(t, Descriptor::must_not_fin()),
        Atom::Res {
            modulus, residue, ..
        } => {
            let n = *modulus as u64;
            let others: Vec<u64> = (0..n).filter(|&s| s != *residue as u64).collect();
            let mut ds = vec![Descriptor::must_not_fin()];
            if !others.is_empty() {
                ds.push(Descriptor {
                    count: Count::AtLeast(0),
                    fin: FinStatus::MustFin,
                    residue: Some(Residue::new(n, others)),
                });
            }
            Condition::any(t, ds)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, print};

    fn atom(src: &str) -> Atom {
        match parse(src).unwrap() {
            Formula::Atom(a) => a,
            other => panic!("not an atom: {other:?}"),
        }
    }

    #[test]
    fn negated_residue() {
        let c = negate_atom(&atom("Res[2,0](x)"));
        assert_eq!(print(&c.to_formula()), "~Fin(x) | Fin(x) & Res[2,1](x)");
    }

    #[test]
    fn negated_count_and_fin() {
        let x = Term::var("x");
        assert_eq!(
            negate_atom(&atom("C[1](x)")),
            Condition::single(&x, Descriptor::exact(0))
        );
        assert_eq!(
            negate_atom(&atom("Fin(x)")),
            Condition::single(&x, Descriptor::must_not_fin())
        );
    }

    #[test]
    fn negation_is_complement() {
        let atoms = [
            "x = 0",
            "C[1](x)",
            "C[4](x)",
            "Fin(x)",
            "Res[1,0](x)",
            "Res[2,0](x)",
            "Res[5,3](x)",
        ];
        let cards = (0..40).map(Card::Finite).chain([Card::Infinite]);
        for src in atoms {
            let a = atom(src);
            let (pos, neg) = (atom_condition(&a), negate_atom(&a));
            for c in cards.clone() {
                let f = |_: &Term| c;
                assert_ne!(pos.holds(&f), neg.holds(&f), "{src} at {c}");
            }
        }
    }
}
