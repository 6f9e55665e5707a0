//! Formula evaluation over two interchangeable set representations: exact
//! [`EPSet`] values, and bit windows for sets whose thresholds and periods
//! fit a fixed window.

use crate::ast::{Atom, Card, Formula, Term, Var};

use super::{EPSet, EvalError, Tri};

pub(crate) trait Universe {
    type Set: Clone;

    fn zero(&self) -> Self::Set;
    fn one(&self) -> Self::Set;
    fn meet(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn xor(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn card(&self, a: &Self::Set) -> Card;
}

pub(crate) struct Exact;

impl Universe for Exact {
    type Set = EPSet;

    fn zero(&self) -> EPSet {
        EPSet::empty()
    }

    fn one(&self) -> EPSet {
        EPSet::full()
    }

    fn meet(&self, a: &EPSet, b: &EPSet) -> EPSet {
        a.intersection(b)
    }

    fn xor(&self, a: &EPSet, b: &EPSet) -> EPSet {
        a.sum(b)
    }

    fn card(&self, a: &EPSet) -> Card {
        a.card()
    }
}

/// Sets with threshold at most `threshold` and period dividing `period`,
/// stored as their membership bits on `[0, threshold + period)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Window {
    threshold: u32,
    period: u32,
    full: u128,
    periodic: u128,
}

impl Window {
    pub(crate) fn new(threshold: u64, period: u64) -> Option<Window> {
        let width = threshold.checked_add(period)?;
        if width > 128 || period == 0 {
            return None;
        }
        let full = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        let low = (1u128 << threshold) - 1;
        Some(Window {
            threshold: threshold as u32,
            period: period as u32,
            full,
            periodic: full & !low,
        })
    }

    pub(crate) fn fits(&self, s: &EPSet) -> bool {
        s.threshold() <= self.threshold as u64 && self.period as u64 % s.period() == 0
    }

    pub(crate) fn pack(&self, s: &EPSet) -> u128 {
        debug_assert!(self.fits(s));
        let width = self.threshold + self.period;
        (0..width)
            .filter(|&n| s.contains(n as u64))
            .fold(0u128, |acc, n| acc | (1u128 << n))
    }
}

impl Universe for Window {
    type Set = u128;

    fn zero(&self) -> u128 {
        0
    }

    fn one(&self) -> u128 {
        self.full
    }

    fn meet(&self, a: &u128, b: &u128) -> u128 {
        a & b
    }

    fn xor(&self, a: &u128, b: &u128) -> u128 {
        a ^ b
    }

    fn card(&self, a: &u128) -> Card {
        if a & self.periodic != 0 {
            Card::Infinite
        } else {
            Card::Finite(a.count_ones() as u64)
        }
    }
}

pub(crate) type Env<S> = Vec<(Var, S)>;

fn lookup<'a, S>(env: &'a Env<S>, v: &Var) -> Result<&'a S, EvalError> {
    env.iter()
        .rev()
        .find(|(w, _)| w == v)
        .map(|(_, s)| s)
        .ok_or_else(|| EvalError::MissingVariable(v.clone()))
}

pub(crate) fn eval_term<U: Universe>(u: &U, t: &Term, env: &Env<U::Set>) -> Result<U::Set, EvalError> {
    let mut acc = u.zero();
    for m in t.monomials() {
        let mut prod = u.one();
        for v in m {
            prod = u.meet(&prod, lookup(env, v)?);
        }
        acc = u.xor(&acc, &prod);
    }
    Ok(acc)
}

pub(crate) fn eval_atom<U: Universe>(u: &U, a: &Atom, env: &Env<U::Set>) -> Result<bool, EvalError> {
    let c = u.card(&eval_term(u, a.term(), env)?);
    Ok(match a {
        Atom::IsZero(_) => c == Card::Finite(0),
        Atom::AtLeast(k, _) => c >= Card::Finite(*k as u64),
        Atom::Fin(_) => c.is_finite(),
        Atom::Res {
            modulus, residue, ..
        } => c.finite().is_some_and(|n| n % *modulus as u64 == *residue as u64),
    })
}

pub(crate) fn eval_qf<U: Universe>(u: &U, f: &Formula, env: &Env<U::Set>) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Const(b) => *b,
        Formula::Atom(a) => eval_atom(u, a, env)?,
        Formula::Not(g) => !eval_qf(u, g, env)?,
        Formula::And(a, b) => eval_qf(u, a, env)? && eval_qf(u, b, env)?,
        Formula::Or(a, b) => eval_qf(u, a, env)? || eval_qf(u, b, env)?,
        Formula::Implies(a, b) => !eval_qf(u, a, env)? || eval_qf(u, b, env)?,
        Formula::Iff(a, b) => eval_qf(u, a, env)? == eval_qf(u, b, env)?,
        Formula::Exists(..) | Formula::Forall(..) => return Err(EvalError::NotQuantifierFree),
    })
}

/// Whether bounded evaluation of `f` can ever return the definite value
/// `want`. Existentials are only ever certified true and universals only
/// certified false, so searches that cannot change the outcome are skipped.
pub fn can_certify(f: &Formula, want: bool) -> bool {
    match f {
        Formula::Const(_) | Formula::Atom(_) => true,
        Formula::Not(g) => can_certify(g, !want),
        Formula::And(a, b) => {
            if want {
                can_certify(a, true) && can_certify(b, true)
            } else {
                can_certify(a, false) || can_certify(b, false)
            }
        }
        Formula::Or(a, b) => {
            if want {
                can_certify(a, true) || can_certify(b, true)
            } else {
                can_certify(a, false) && can_certify(b, false)
            }
        }
        Formula::Implies(a, b) => {
            if want {
                can_certify(a, false) || can_certify(b, true)
            } else {
                can_certify(a, true) && can_certify(b, false)
            }
        }
        Formula::Iff(a, b) => {
            (can_certify(a, true) && can_certify(b, want))
                || (can_certify(a, false) && can_certify(b, !want))
        }
        Formula::Exists(v, g) => {
            if g.free_vars().contains(v) {
                want && can_certify(g, true)
            } else {
                can_certify(g, want)
            }
        }
        Formula::Forall(v, g) => {
            if g.free_vars().contains(v) {
                !want && can_certify(g, false)
            } else {
                can_certify(g, want)
            }
        }
    }
}

/// Three-valued evaluation with quantifiers ranging over `candidates`.
pub(crate) fn eval_tri<U: Universe>(
    u: &U,
    f: &Formula,
    env: &mut Env<U::Set>,
    candidates: &[U::Set],
) -> Result<Tri, EvalError> {
    Ok(match f {
        Formula::Const(b) => Tri::from(*b),
        Formula::Atom(a) => Tri::from(eval_atom(u, a, env)?),
        Formula::Not(g) => eval_tri(u, g, env, candidates)?.not(),
        Formula::And(a, b) => {
            let x = eval_tri(u, a, env, candidates)?;
            if x == Tri::False || (x == Tri::Unknown && !can_certify(b, false)) {
                x
            } else {
                x.and(eval_tri(u, b, env, candidates)?)
            }
        }
        Formula::Or(a, b) => {
            let x = eval_tri(u, a, env, candidates)?;
            if x == Tri::True || (x == Tri::Unknown && !can_certify(b, true)) {
                x
            } else {
                x.or(eval_tri(u, b, env, candidates)?)
            }
        }
        Formula::Implies(a, b) => {
            let x = eval_tri(u, a, env, candidates)?.not();
            if x == Tri::True || (x == Tri::Unknown && !can_certify(b, true)) {
                x
            } else {
                x.or(eval_tri(u, b, env, candidates)?)
            }
        }
        Formula::Iff(a, b) => {
            let x = eval_tri(u, a, env, candidates)?;
            if x == Tri::Unknown {
                Tri::Unknown
            } else {
                x.iff(eval_tri(u, b, env, candidates)?)
            }
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let exists = matches!(f, Formula::Exists(..));
            if !g.free_vars().contains(v) {
                // The domain is nonempty, so a vacuous quantifier is exact.
                return eval_tri(u, g, env, candidates);
            }
            let decisive = Tri::from(exists);
            if !can_certify(g, exists) {
                return Ok(Tri::Unknown);
            }
            find(u, v, g, env, candidates, decisive)?
                .map_or(Tri::Unknown, |_| decisive)
        }
    })
}

/// Index of the first candidate for `v` under which `g` evaluates to
/// `target`.
pub(crate) fn find<U: Universe>(
    u: &U,
    v: &Var,
    g: &Formula,
    env: &mut Env<U::Set>,
    candidates: &[U::Set],
    target: Tri,
) -> Result<Option<usize>, EvalError> {
    for (i, c) in candidates.iter().enumerate() {
        env.push((v.clone(), c.clone()));
        let r = eval_tri(u, g, env, candidates);
        env.pop();
        if r? == target {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
