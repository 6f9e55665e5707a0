use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::term::{Term, Var};

/// Language level of a formula: L1 uses only `C_k` and equations, L2 adds
/// `Fin`, L3 adds the `Res(n, r)` predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::L1 => "L1",
            Level::L2 => "L2",
            Level::L3 => "L3",
        })
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Level, String> {
        match s {
            "L1" | "l1" => Ok(Level::L1),
            "L2" | "l2" => Ok(Level::L2),
            "L3" | "l3" => Ok(Level::L3),
            _ => Err(format!("unknown level `{s}` (expected L1, L2 or L3)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("count predicate index must be at least 1")]
    ZeroCountIndex,
    #[error("residue modulus must be at least 1")]
    ZeroModulus,
}

/// Atomic formulas. Equations are kept as `IsZero(s + t)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    IsZero(Term),
    /// `C_k(t)`: at least `k` atoms below `t`, `k >= 1`.
    AtLeast(u32, Term),
    Fin(Term),
    /// `Res(n, r)(t)` with `0 <= r < n`.
    Res { modulus: u32, residue: u32, term: Term },
}

impl Atom {
    pub fn at_least(k: u32, t: Term) -> Result<Atom, AtomError> {
        if k == 0 {
            return Err(AtomError::ZeroCountIndex);
        }
        Ok(Atom::AtLeast(k, t))
    }

    /// Builds `Res(n, r)(t)`, reducing `r` modulo `n`.
    pub fn res(modulus: u32, residue: i64, term: Term) -> Result<Atom, AtomError> {
        if modulus == 0 {
            return Err(AtomError::ZeroModulus);
        }
        let residue = residue.rem_euclid(modulus as i64) as u32;
        Ok(Atom::Res {
            modulus,
            residue,
            term,
        })
    }

    pub fn term(&self) -> &Term {
        match self {
            Atom::IsZero(t) | Atom::AtLeast(_, t) | Atom::Fin(t) => t,
            Atom::Res { term, .. } => term,
        }
    }

    pub fn level(&self) -> Level {
        match self {
            Atom::IsZero(_) | Atom::AtLeast(..) => Level::L1,
            Atom::Fin(_) => Level::L2,
            Atom::Res { .. } => Level::L3,
        }
    }

    pub fn map_term(&self, f: impl FnOnce(&Term) -> Term) -> Atom {
        match self {
            Atom::IsZero(t) => Atom::IsZero(f(t)),
            Atom::AtLeast(k, t) => Atom::AtLeast(*k, f(t)),
            Atom::Fin(t) => Atom::Fin(f(t)),
            Atom::Res {
                modulus,
                residue,
                term,
            } => Atom::Res {
                modulus: *modulus,
                residue: *residue,
                term: f(term),
            },
        }
    }

    /// Truth value when the term is a constant, using the closed-atom table
    /// of an infinite atomic algebra (`1` has infinitely many atoms and is not `Fin`).
    pub fn closed_value(&self) -> Option<bool> {
        let t = self.term();
        if !t.is_constant() {
            return None;
        }
        let one = t.is_one();
        Some(match self {
            Atom::IsZero(_) => !one,
            Atom::AtLeast(..) => one,
            Atom::Fin(_) => !one,
            Atom::Res { residue, .. } => !one && *residue == 0,
        })
    }
}

/// First-order formulas over [`Atom`]s.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Const(bool),
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    /// Left-nested conjunction; `true` for an empty iterator.
    pub fn and_all<I: IntoIterator<Item = Formula>>(iter: I) -> Formula {
        iter.into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Const(true))
    }

    /// Left-nested disjunction; `false` for an empty iterator.
    pub fn or_all<I: IntoIterator<Item = Formula>>(iter: I) -> Formula {
        iter.into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Const(false))
    }

    /// `s = t`, stored as `s + t = 0`.
    pub fn eq(s: &Term, t: &Term) -> Formula {
        Formula::Atom(Atom::IsZero(s + t))
    }

    pub fn ne(s: &Term, t: &Term) -> Formula {
        Formula::not(Formula::eq(s, t))
    }

    /// `s <= t`, i.e. `s.t = s`.
    pub fn le(s: &Term, t: &Term) -> Formula {
        Formula::Atom(Atom::IsZero(s.minus(t)))
    }

    /// `s < t`, i.e. `s <= t` and `s != t`.
    pub fn lt(s: &Term, t: &Term) -> Formula {
        Formula::and(Formula::le(s, t), Formula::ne(s, t))
    }

    pub fn level(&self) -> Level {
        let mut level = Level::L1;
        self.visit_atoms(&mut |a| level = level.max(a.level()));
        level
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_atoms(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Formula::Const(_) => BTreeSet::new(),
            Formula::Atom(a) => a.term().vars(),
            Formula::Not(g) => g.free_vars(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let mut s = g.free_vars();
                s.remove(v);
                s
            }
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        self.collect_all_vars(&mut s);
        s
    }

    fn collect_all_vars(&self, s: &mut BTreeSet<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(a) => s.extend(a.term().vars()),
            Formula::Not(g) => g.collect_all_vars(s),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_all_vars(s);
                b.collect_all_vars(s);
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                s.insert(v.clone());
                g.collect_all_vars(s);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.quantifier_depth() == 0
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(_) => 0,
            Formula::Not(g) => g.quantifier_depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.quantifier_depth(),
        }
    }

    /// Connective, quantifier and atom nodes; terms are not counted.
    pub fn size(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(_) => 1,
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.map_atoms(f))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.map_atoms(f))),
        }
    }

    /// Capture-avoiding substitution of `t` for the free occurrences of `v`.
    pub fn substitute(&self, v: &Var, t: &Term) -> Formula {
        let avoid: BTreeSet<Var> = t.vars();
        self.subst_inner(v, t, &avoid)
    }

    fn subst_inner(&self, v: &Var, t: &Term, avoid: &BTreeSet<Var>) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(a) => Formula::Atom(a.map_term(|s| s.substitute(v, t))),
            Formula::Not(g) => Formula::not(g.subst_inner(v, t, avoid)),
            Formula::And(a, b) => {
                Formula::and(a.subst_inner(v, t, avoid), b.subst_inner(v, t, avoid))
            }
            Formula::Or(a, b) => Formula::or(a.subst_inner(v, t, avoid), b.subst_inner(v, t, avoid)),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst_inner(v, t, avoid), b.subst_inner(v, t, avoid))
            }
            Formula::Iff(a, b) => {
                Formula::iff(a.subst_inner(v, t, avoid), b.subst_inner(v, t, avoid))
            }
            Formula::Exists(w, g) | Formula::Forall(w, g) => {
                let is_exists = matches!(self, Formula::Exists(..));
                if w == v || !g.free_vars().contains(v) {
                    return self.clone();
                }
                let (w, g) = if avoid.contains(w) {
                    let mut taken = g.all_vars();
                    taken.extend(avoid.iter().cloned());
                    taken.insert(v.clone());
                    let fresh = fresh_name(w, &taken);
                    let body = g.rename_free(w, &fresh);
                    (fresh, body)
                } else {
                    (w.clone(), (**g).clone())
                };
                let body = Box::new(g.subst_inner(v, t, avoid));
                if is_exists {
                    Formula::Exists(w, body)
                } else {
                    Formula::Forall(w, body)
                }
            }
        }
    }

    fn rename_free(&self, from: &Var, to: &Var) -> Formula {
        self.subst_inner(from, &Term::var(to.clone()), &BTreeSet::new())
    }

    /// Renames bound variables so that they are pairwise distinct and
    /// distinct from every free variable. Idempotent.
    pub fn rectify(&self) -> Formula {
        let mut used = self.free_vars();
        self.rectify_in(&mut used, &BTreeMap::new())
    }

    fn rectify_in(&self, used: &mut BTreeSet<Var>, env: &BTreeMap<Var, Var>) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(a) => Formula::Atom(a.map_term(|t| t.rename(env))),
            Formula::Not(g) => Formula::not(g.rectify_in(used, env)),
            Formula::And(a, b) => {
                let a = a.rectify_in(used, env);
                Formula::and(a, b.rectify_in(used, env))
            }
            Formula::Or(a, b) => {
                let a = a.rectify_in(used, env);
                Formula::or(a, b.rectify_in(used, env))
            }
            Formula::Implies(a, b) => {
                let a = a.rectify_in(used, env);
                Formula::implies(a, b.rectify_in(used, env))
            }
            Formula::Iff(a, b) => {
                let a = a.rectify_in(used, env);
                Formula::iff(a, b.rectify_in(used, env))
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let target = if used.contains(v) {
                    fresh_name(v, used)
                } else {
                    v.clone()
                };
                used.insert(target.clone());
                let mut inner = env.clone();
                inner.insert(v.clone(), target.clone());
                let body = Box::new(g.rectify_in(used, &inner));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(target, body)
                } else {
                    Formula::Forall(target, body)
                }
            }
        }
    }
}

/// `v_1`, `v_2`, ... : the first name not in `taken`.
pub fn fresh_name(v: &Var, taken: &BTreeSet<Var>) -> Var {
    let base = v.as_str();
    (1..)
        .map(|i| Var::new(&format!("{base}_{i}")))
        .find(|cand| !taken.contains(cand))
        .expect("unbounded name supply")
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
    fn res_residue_is_canonical() {
        let a = Atom::res(2, 5, x()).unwrap();
        assert_eq!(
            a,
            Atom::Res {
                modulus: 2,
                residue: 1,
                term: x()
            }
        );
        assert_eq!(Atom::res(3, -1, x()).unwrap(), Atom::res(3, 2, x()).unwrap());
        assert_eq!(Atom::res(0, 1, x()), Err(AtomError::ZeroModulus));
        assert_eq!(Atom::at_least(0, x()), Err(AtomError::ZeroCountIndex));
    }

    #[test]
    fn free_vars_of_quantified() {
        let f = Formula::exists("x", Atom::AtLeast(1, &x() * &y()).into());
        assert_eq!(f.free_vars(), [Var::new("y")].into_iter().collect());
    }

    #[test]
    fn substitute_constant() {
        let f: Formula = Atom::AtLeast(1, x()).into();
        assert_eq!(
            f.substitute(&Var::new("x"), &Term::one()),
            Atom::AtLeast(1, Term::one()).into()
        );
        let g: Formula = Atom::Fin(&x() * &y()).into();
        assert_eq!(
            g.substitute(&Var::new("x"), &y().complement()),
            Atom::Fin(Term::zero()).into()
        );
    }

    #[test]
    fn substitute_avoids_capture() {
        // E y (x = y) with x := y must not become E y (y = y).
        let f = Formula::exists("y", Formula::eq(&x(), &y()));
        let g = f.substitute(&Var::new("x"), &y());
        assert_eq!(g.free_vars(), [Var::new("y")].into_iter().collect());
        assert_ne!(g, Formula::exists("y", Formula::Const(true)));
    }

    #[test]
    fn rectify_separates_names() {
        // (E x C1(x)) & (E x Fin(x)) & C1(x)
        let f = Formula::and(
            Formula::and(
                Formula::exists("x", Atom::AtLeast(1, x()).into()),
                Formula::exists("x", Atom::Fin(x()).into()),
            ),
            Atom::AtLeast(1, x()).into(),
        );
        let r = f.rectify();
        let mut bound = Vec::new();
        collect_binders(&r, &mut bound);
        assert_eq!(bound.len(), 2);
        assert_ne!(bound[0], bound[1]);
        assert!(!bound.contains(&Var::new("x")));
        assert_eq!(r.free_vars(), f.free_vars());
        assert_eq!(r.rectify(), r);
    }

    fn collect_binders(f: &Formula, out: &mut Vec<Var>) {
        match f {
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                out.push(v.clone());
                collect_binders(g, out);
            }
            Formula::Not(g) => collect_binders(g, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                collect_binders(a, out);
                collect_binders(b, out);
            }
            _ => {}
        }
    }

    #[test]
    fn level_is_max_of_atoms() {
        let f = Formula::and(
            Atom::AtLeast(2, x()).into(),
            Formula::not(Atom::Fin(y()).into()),
        );
        assert_eq!(f.level(), Level::L2);
        assert_eq!(Formula::Const(true).level(), Level::L1);
    }

    #[test]
    fn closed_atom_table() {
        assert_eq!(Atom::AtLeast(5, Term::one()).closed_value(), Some(true));
        assert_eq!(Atom::AtLeast(1, Term::zero()).closed_value(), Some(false));
        assert_eq!(Atom::Fin(Term::zero()).closed_value(), Some(true));
        assert_eq!(Atom::Fin(Term::one()).closed_value(), Some(false));
        assert_eq!(Atom::res(3, 0, Term::zero()).unwrap().closed_value(), Some(true));
        assert_eq!(Atom::res(3, 1, Term::zero()).unwrap().closed_value(), Some(false));
        assert_eq!(Atom::res(3, 0, Term::one()).unwrap().closed_value(), Some(false));
        assert_eq!(Atom::Fin(x()).closed_value(), None);
    }
}
