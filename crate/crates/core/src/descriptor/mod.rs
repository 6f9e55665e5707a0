//! Per-element constraints: atom counts, finiteness and residues of the count.
//!
//! A [`Descriptor`] denotes a set of cardinalities in `ℕ ∪ {∞}`. Descriptors
//! are kept in a canonical form by [`Descriptor::normalize`]; the
//! unsatisfiable descriptor is represented by `None`.

mod condition;
mod split;
mod table;

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::ast::{Atom, Card, Formula, Term};

pub use condition::{atom_condition, negate_atom, Condition, Literal};
pub use split::{project_split, Projection, SplitError, SplitSpec};
pub use table::MintermTable;
pub(crate) use table::product;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Count {
    Exact(u64),
    AtLeast(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FinStatus {
    MustFin,
    MustNotFin,
    Unconstrained,
}

/// Allowed residues of a finite count modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Residue {
    modulus: u64,
    allowed: BTreeSet<u64>,
}

impl Residue {
    /// Residues are reduced modulo `modulus`. Panics on a zero modulus.
    pub fn new(modulus: u64, allowed: impl IntoIterator<Item = u64>) -> Residue {
        assert!(modulus >= 1, "residue modulus must be positive");
        Residue {
            modulus,
            allowed: allowed.into_iter().map(|r| r % modulus).collect(),
        }
    }

    pub fn single(modulus: u64, r: u64) -> Residue {
        Residue::new(modulus, [r])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn allowed(&self) -> &BTreeSet<u64> {
        &self.allowed
    }

    pub fn contains(&self, c: u64) -> bool {
        self.allowed.contains(&(c % self.modulus))
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.allowed.len() as u64 == self.modulus
    }

    /// The same constraint expressed modulo a multiple `n` of the modulus.
    pub fn lift(&self, n: u64) -> Residue {
        debug_assert_eq!(n % self.modulus, 0);
        Residue {
            modulus: n,
            allowed: (0..n).filter(|&c| self.contains(c)).collect(),
        }
    }

    pub fn intersect(&self, other: &Residue) -> Residue {
        let n = self.modulus.lcm(&other.modulus);
        let (a, b) = (self.lift(n), other.lift(n));
        Residue {
            modulus: n,
            allowed: a.allowed.intersection(&b.allowed).copied().collect(),
        }
    }

    /// Rewrites the constraint over its smallest period.
    pub fn reduce(&self) -> Residue {
        let n = self.modulus;
        for d in (1..=n).filter(|d| n % d == 0) {
            if (0..n).all(|c| self.contains(c) == self.contains(c % d)) {
                return Residue {
                    modulus: d,
                    allowed: self.allowed.iter().filter(|&&r| r < d).copied().collect(),
                };
            }
        }
        unreachable!("n divides itself")
    }
}

/// Smallest `c ≥ k` with `c ≡ r (mod n)`.
pub(crate) fn first_at_least(k: u64, r: u64, n: u64) -> u64 {
    let r = r % n;
    k + (r + n - k % n) % n
}

/// A constraint on the cardinality of one element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Descriptor {
    pub count: Count,
    pub fin: FinStatus,
    pub residue: Option<Residue>,
}

impl Default for Descriptor {
    fn default() -> Self {
        Descriptor::trivial()
    }
}

impl Descriptor {
    /// Satisfied by every cardinality.
    pub fn trivial() -> Descriptor {
        Descriptor {
            count: Count::AtLeast(0),
            fin: FinStatus::Unconstrained,
            residue: None,
        }
    }

    pub fn exact(e: u64) -> Descriptor {
        Descriptor {
            count: Count::Exact(e),
            fin: FinStatus::MustFin,
            residue: None,
        }
    }

    pub fn at_least(k: u64) -> Descriptor {
        Descriptor {
            count: Count::AtLeast(k),
            ..Descriptor::trivial()
        }
    }

    pub fn must_fin() -> Descriptor {
        Descriptor {
            fin: FinStatus::MustFin,
            ..Descriptor::trivial()
        }
    }

    pub fn must_not_fin() -> Descriptor {
        Descriptor {
            fin: FinStatus::MustNotFin,
            ..Descriptor::trivial()
        }
    }

    /// Finite with count residue in `allowed` modulo `modulus`.
    pub fn residues(modulus: u64, allowed: impl IntoIterator<Item = u64>) -> Descriptor {
        Descriptor {
            count: Count::AtLeast(0),
            fin: FinStatus::MustFin,
            residue: Some(Residue::new(modulus, allowed)),
        }
    }

    pub fn with_count(mut self, count: Count) -> Descriptor {
        self.count = count;
        self
    }

    pub fn with_fin(mut self, fin: FinStatus) -> Descriptor {
        self.fin = fin;
        self
    }

    pub fn with_residue(mut self, residue: Residue) -> Descriptor {
        self.residue = Some(residue);
        self
    }

    pub fn is_trivial(&self) -> bool {
        *self == Descriptor::trivial()
    }

    /// Membership of a cardinality in the denotation. Works on descriptors
    /// that are not normalized.
    pub fn admits(&self, c: Card) -> bool {
        let count_ok = match (self.count, c) {
            (Count::Exact(e), Card::Finite(n)) => n == e,
            (Count::Exact(_), Card::Infinite) => false,
            (Count::AtLeast(k), Card::Finite(n)) => n >= k,
            (Count::AtLeast(_), Card::Infinite) => true,
        };
        let fin_ok = match self.fin {
            FinStatus::MustFin => c.is_finite(),
            FinStatus::MustNotFin => !c.is_finite(),
            FinStatus::Unconstrained => true,
        };
        let res_ok = match (&self.residue, c) {
            (None, _) => true,
            (Some(r), Card::Finite(n)) => r.contains(n),
            (Some(_), Card::Infinite) => false,
        };
        count_ok && fin_ok && res_ok
    }

    /// Canonical form, or `None` when the denotation is empty.
    ///
    /// Residues force finiteness; exact counts absorb residues and force
    /// finiteness; a non-finite requirement absorbs any lower bound. A
    /// residue set is stored over its smallest period and a finite lower
    /// bound is raised to the least admissible count.
    pub fn normalize(&self) -> Option<Descriptor> {
        let mut fin = self.fin;
        let mut count = self.count;
        let mut residue = None;
        if let Some(r) = &self.residue {
            if r.is_empty() || fin == FinStatus::MustNotFin {
                return None;
            }
            fin = FinStatus::MustFin;
            let r = r.reduce();
            if !r.is_full() {
                residue = Some(r);
            }
        }
        match count {
            Count::Exact(e) => {
                if fin == FinStatus::MustNotFin {
                    return None;
                }
                if let Some(r) = &residue {
                    if !r.contains(e) {
                        return None;
                    }
                }
                return Some(Descriptor::exact(e));
            }
            Count::AtLeast(k) => {
                if fin == FinStatus::MustNotFin {
                    count = Count::AtLeast(0);
                } else if let Some(r) = &residue {
                    let least = r
                        .allowed
                        .iter()
                        .map(|&s| first_at_least(k, s, r.modulus))
                        .min()
                        .expect("nonempty residue set");
                    count = Count::AtLeast(least);
                }
            }
        }
        Some(Descriptor {
            count,
            fin,
            residue,
        })
    }

    /// True iff some cardinality satisfies the descriptor.
    pub fn satisfiable(&self) -> bool {
        self.normalize().is_some()
    }

    /// Meet in the constraint lattice; `None` when the constraints conflict.
    pub fn conjoin(&self, other: &Descriptor) -> Option<Descriptor> {
        let count = match (self.count, other.count) {
            (Count::Exact(a), Count::Exact(b)) => {
                if a != b {
                    return None;
                }
                Count::Exact(a)
            }
            (Count::Exact(e), Count::AtLeast(k)) | (Count::AtLeast(k), Count::Exact(e)) => {
                if e < k {
                    return None;
                }
                Count::Exact(e)
            }
            (Count::AtLeast(a), Count::AtLeast(b)) => Count::AtLeast(a.max(b)),
        };
        let fin = match (self.fin, other.fin) {
            (FinStatus::Unconstrained, f) | (f, FinStatus::Unconstrained) => f,
            (a, b) if a == b => a,
            _ => return None,
        };
        let residue = match (&self.residue, &other.residue) {
            (None, None) => None,
            (Some(r), None) | (None, Some(r)) => Some(r.clone()),
            (Some(a), Some(b)) => Some(a.intersect(b)),
        };
        Descriptor {
            count,
            fin,
            residue,
        }
        .normalize()
    }

    /// The descriptor as a quantifier-free formula about `t`, in the order
    /// finiteness, residues, count.
    pub fn to_formula(&self, t: &Term) -> Formula {
        let Some(d) = self.normalize() else {
            return Formula::Const(false);
        };
        let atom = |a: Atom| Formula::Atom(a);
        let mut parts = Vec::new();
        if let Count::Exact(e) = d.count {
            if e == 0 {
                parts.push(atom(Atom::IsZero(t.clone())));
            } else {
                parts.push(atom(count_atom(e, t)));
                parts.push(Formula::not(atom(count_atom(e + 1, t))));
            }
            return Formula::and_all(parts);
        }
        match d.fin {
            FinStatus::MustFin => parts.push(atom(Atom::Fin(t.clone()))),
            FinStatus::MustNotFin => parts.push(Formula::not(atom(Atom::Fin(t.clone())))),
            FinStatus::Unconstrained => {}
        }
        if let Some(r) = &d.residue {
            parts.push(Formula::or_all(
                r.allowed
                    .iter()
                    .map(|&s| atom(res_atom(r.modulus, s, t))),
            ));
        }
        if let Count::AtLeast(k) = d.count {
            // The least count admitted by the residues alone is implied.
            let implied = d
                .residue
                .as_ref()
                .and_then(|r| r.allowed.iter().min().copied())
                .unwrap_or(0);
            if k > implied {
                parts.push(atom(count_atom(k, t)));
            }
        }
        Formula::and_all(parts)
    }
}

fn count_atom(k: u64, t: &Term) -> Atom {
    Atom::at_least(u32::try_from(k).expect("count index fits in u32"), t.clone())
        .expect("positive count index")
}

fn res_atom(n: u64, r: u64, t: &Term) -> Atom {
    Atom::res(
        u32::try_from(n).expect("modulus fits in u32"),
        r as i64,
        t.clone(),
    )
    .expect("positive modulus")
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.count {
            Count::Exact(e) => parts.push(format!("Exact({e})")),
            Count::AtLeast(0) => {}
            Count::AtLeast(k) => parts.push(format!("AtLeast({k})")),
        }
        match self.fin {
            FinStatus::MustFin => parts.push("MustFin".into()),
            FinStatus::MustNotFin => parts.push("MustNotFin".into()),
            FinStatus::Unconstrained => {}
        }
        if let Some(r) = &self.residue {
            let s: Vec<String> = r.allowed.iter().map(u64::to_string).collect();
            parts.push(format!("mod {} {{{}}}", r.modulus, s.join(",")));
        }
        if parts.is_empty() {
            f.write_str("trivial")
        } else {
            f.write_str(&parts.join(" & "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Cardinalities probed when comparing denotations. Thresholds and moduli
    /// in the generated descriptors stay small, so 0..96 plus infinity
    /// separates every pair of distinct denotations.
    fn probes() -> impl Iterator<Item = Card> {
        (0..96).map(Card::Finite).chain([Card::Infinite])
    }

    fn denotation(d: Option<&Descriptor>) -> Vec<bool> {
        probes().map(|c| d.is_some_and(|d| d.admits(c))).collect()
    }

    fn arb_descriptor() -> impl Strategy<Value = Descriptor> {
        let count = prop_oneof![
            (0u64..8).prop_map(Count::Exact),
            (0u64..8).prop_map(Count::AtLeast)
        ];
        let fin = prop_oneof![
            Just(FinStatus::MustFin),
            Just(FinStatus::MustNotFin),
            Just(FinStatus::Unconstrained)
        ];
        let residue = prop_oneof![
            Just(None),
            (1u64..7)
                .prop_flat_map(|n| (Just(n), proptest::collection::btree_set(0..n, 1..=n as usize)))
                .prop_map(|(n, s)| Some(Residue::new(n, s)))
        ];
        (count, fin, residue).prop_map(|(count, fin, residue)| Descriptor {
            count,
            fin,
            residue,
        })
    }

    #[test]
    fn exact_meets_non_fin_is_unsat() {
        assert_eq!(Descriptor::exact(3).conjoin(&Descriptor::must_not_fin()), None);
    }

    #[test]
    fn residues_meet_by_crt() {
        let a = Descriptor::residues(2, [0]);
        let b = Descriptor::residues(3, [1]);
        let m = a.conjoin(&b).unwrap();
        // Brute force over 0..6: the residues that are even and 1 mod 3.
        let expected: BTreeSet<u64> = (0..6).filter(|c| c % 2 == 0 && c % 3 == 1).collect();
        assert_eq!(expected, BTreeSet::from([4]));
        assert_eq!(m.residue, Some(Residue::new(6, expected)));
        assert_eq!(m.fin, FinStatus::MustFin);
    }

    #[test]
    fn satisfiability_examples() {
        assert!(Descriptor::at_least(5).with_fin(FinStatus::MustFin).satisfiable());
        assert!(!Descriptor::must_not_fin()
            .with_residue(Residue::single(2, 0))
            .satisfiable());
        assert!(!Descriptor::exact(3)
            .with_residue(Residue::single(2, 0))
            .satisfiable());
        assert!(Descriptor::at_least(9).with_fin(FinStatus::MustNotFin).satisfiable());
    }

    #[test]
    fn normal_form_raises_bounds_and_reduces_periods() {
        let d = Descriptor::residues(6, [1, 3, 5]).with_count(Count::AtLeast(4));
        let n = d.normalize().unwrap();
        assert_eq!(n.residue, Some(Residue::single(2, 1)));
        assert_eq!(n.count, Count::AtLeast(5));
        assert_eq!(
            Descriptor::residues(3, [0, 1, 2]).normalize().unwrap(),
            Descriptor::must_fin()
        );
    }

    #[test]
    fn formulas_render_in_order() {
        let x = Term::var("x");
        let d = Descriptor::residues(3, [2]).with_count(Count::AtLeast(5));
        assert_eq!(
            crate::syntax::print(&d.to_formula(&x)),
            "Fin(x) & Res[3,2](x) & C[5](x)"
        );
        let d = Descriptor::residues(3, [2]).with_count(Count::AtLeast(2));
        assert_eq!(crate::syntax::print(&d.to_formula(&x)), "Fin(x) & Res[3,2](x)");
        assert_eq!(
            crate::syntax::print(&Descriptor::exact(2).to_formula(&x)),
            "C[2](x) & ~C[3](x)"
        );
        assert_eq!(
            crate::syntax::print(&Descriptor::exact(0).to_formula(&x)),
            "x = 0"
        );
    }

    proptest! {
        #[test]
        fn normalize_preserves_denotation(d in arb_descriptor()) {
            let n = d.normalize();
            prop_assert_eq!(denotation(n.as_ref()), denotation(Some(&d)));
            if let Some(n) = &n {
                prop_assert_eq!(&n.normalize(), &Some(n.clone()));
            }
        }

        #[test]
        fn equal_denotations_have_equal_forms(a in arb_descriptor(), b in arb_descriptor()) {
            let (na, nb) = (a.normalize(), b.normalize());
            prop_assert_eq!(denotation(na.as_ref()) == denotation(nb.as_ref()), na == nb);
        }

        #[test]
        fn conjoin_is_intersection(a in arb_descriptor(), b in arb_descriptor()) {
            let m = a.conjoin(&b);
            let expected: Vec<bool> = probes().map(|c| a.admits(c) && b.admits(c)).collect();
            prop_assert_eq!(denotation(m.as_ref()), expected);
        }

        #[test]
        fn lattice_laws(a in arb_descriptor(), b in arb_descriptor(), c in arb_descriptor()) {
            prop_assert_eq!(a.conjoin(&b), b.conjoin(&a));
            let left = a.conjoin(&b).and_then(|ab| ab.conjoin(&c));
            let right = b.conjoin(&c).and_then(|bc| a.conjoin(&bc));
            prop_assert_eq!(left, right);
            prop_assert_eq!(a.conjoin(&a), a.normalize());
            prop_assert_eq!(a.conjoin(&Descriptor::trivial()), a.normalize());
        }
    }
}
