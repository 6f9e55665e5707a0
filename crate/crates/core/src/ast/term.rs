use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

/// A variable name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// A product of distinct variables. The empty monomial is the constant 1.
pub type Monomial = BTreeSet<Var>;

/// A multilinear polynomial over GF(2): the Boolean-ring form of a lattice term.
///
/// Terms only exist in normal form: monomials are sets (so `x.x = x`) and the
/// monomial collection is a set (so `t + t = 0`). Two terms denote the same
/// Boolean function exactly when they are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Term {
    monomials: BTreeSet<Monomial>,
}

impl Term {
    pub fn zero() -> Self {
        Term::default()
    }

    pub fn one() -> Self {
        let mut monomials = BTreeSet::new();
        monomials.insert(Monomial::new());
        Term { monomials }
    }

    pub fn var(v: impl Into<Var>) -> Self {
        let mut m = Monomial::new();
        m.insert(v.into());
        let mut monomials = BTreeSet::new();
        monomials.insert(m);
        Term { monomials }
    }

    /// Builds a term from arbitrary monomials, cancelling duplicates in pairs.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut monomials = BTreeSet::new();
        for m in iter {
            if !monomials.remove(&m) {
                monomials.insert(m);
            }
        }
        Term { monomials }
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.monomials.iter()
    }

    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.monomials.len() == 1 && self.monomials.iter().next().is_some_and(|m| m.is_empty())
    }

    pub fn is_constant(&self) -> bool {
        self.monomials.iter().all(|m| m.is_empty())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.monomials.iter().flatten().cloned().collect()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.monomials.iter().any(|m| m.contains(v))
    }

    /// Complement: `1 + t`.
    pub fn complement(&self) -> Term {
        &Term::one() + self
    }

    /// Lattice join: `s + t + s.t`.
    pub fn join(&self, other: &Term) -> Term {
        let prod = self * other;
        &(self + other) + &prod
    }

    /// Relative complement `s - t = s + s.t`.
    pub fn minus(&self, other: &Term) -> Term {
        self + &(self * other)
    }

    /// Replaces `v` by `t` and renormalizes.
    pub fn substitute(&self, v: &Var, t: &Term) -> Term {
        if !self.mentions(v) {
            return self.clone();
        }
        let mut acc = Term::zero();
        for m in &self.monomials {
            if m.contains(v) {
                let mut rest = m.clone();
                rest.remove(v);
                let rest = Term::from_monomials([rest]);
                acc = &acc + &(&rest * t);
            } else {
                acc = &acc + &Term::from_monomials([m.clone()]);
            }
        }
        acc
    }

    /// Evaluates the polynomial at a 0/1 point.
    pub fn eval_bool(&self, point: &dyn Fn(&Var) -> bool) -> bool {
        self.monomials
            .iter()
            .filter(|m| m.iter().all(point))
            .count()
            % 2
            == 1
    }

    /// Renames variables according to `map`; unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Term {
        Term::from_monomials(self.monomials.iter().map(|m| {
            m.iter()
                .map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
                .collect()
        }))
    }

    /// If the term is a product of literals over its own variables
    /// (`x.(1+y)` and the like), returns `(positive, negated)` variable lists.
    pub fn as_cube(&self) -> Option<(Vec<Var>, Vec<Var>)> {
        if self.is_zero() {
            return None;
        }
        let positive = self.monomials.iter().min_by_key(|m| m.len())?.clone();
        let negated: Vec<Var> = self.vars().difference(&positive).cloned().collect();
        let mut cube = Term::one();
        for v in &positive {
            cube = &cube * &Term::var(v.clone());
        }
        for v in &negated {
            cube = &cube * &Term::var(v.clone()).complement();
        }
        (cube == *self).then(|| (positive.into_iter().collect(), negated))
    }

    /// Number of syntax nodes in the ring rendering; used for size budgets.
    pub fn node_count(&self) -> usize {
        let leaves: usize = self.monomials.iter().map(|m| m.len().max(1)).sum();
        let products: usize = self
            .monomials
            .iter()
            .map(|m| m.len().saturating_sub(1))
            .sum();
        leaves + products + self.monomials.len().saturating_sub(1)
    }
}

impl Add for &Term {
    type Output = Term;

    fn add(self, rhs: &Term) -> Term {
        Term {
            monomials: self
                .monomials
                .symmetric_difference(&rhs.monomials)
                .cloned()
                .collect(),
        }
    }
}

impl Mul for &Term {
    type Output = Term;

    fn mul(self, rhs: &Term) -> Term {
        Term::from_monomials(self.monomials.iter().flat_map(|a| {
            rhs.monomials
                .iter()
                .map(move |b| a.union(b).cloned().collect::<Monomial>())
        }))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.is_empty() {
                f.write_str("1")?;
            }
            for (j, v) in m.iter().enumerate() {
                if j > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn characteristic_two() {
        assert!((&x() + &x()).is_zero());
    }

    #[test]
    fn set_and_complement_are_disjoint() {
        assert!((&x() * &x().complement()).is_zero());
    }

    #[test]
    fn idempotent_product() {
        assert_eq!(&x() * &x(), x());
    }

    #[test]
    fn join_expands_to_ring_form() {
        let j = x().join(&y());
        let expected = &(&x() + &y()) + &(&x() * &y());
        assert_eq!(j, expected);
        assert_eq!(x().join(&x()), x());
    }

    #[test]
    fn substitution_renormalizes() {
        let t = &x() * &y();
        assert!(t.substitute(&Var::new("x"), &y().complement()).is_zero());
    }

    #[test]
    fn cube_detection() {
        let t = &x() * &y().complement();
        let (pos, neg) = t.as_cube().unwrap();
        assert_eq!(pos, vec![Var::new("x")]);
        assert_eq!(neg, vec![Var::new("y")]);
        assert!((&x() + &y()).as_cube().is_none());
        assert_eq!(Term::one().as_cube(), Some((vec![], vec![])));
    }
}
