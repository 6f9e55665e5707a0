//! The computable model: eventually periodic subsets of ℕ.
//!
//! Quantifier-free formulas are evaluated exactly. Quantifiers are handled
//! by bounded search over small sets, which can certify an existential true
//! or a universal false but never the converse; everything else is
//! [`Tri::Unknown`].

mod epset;
mod random;
mod universe;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Formula, Term, Var};

pub use epset::{EPSet, EpError};
pub use random::{random_assignment, random_ep, random_ep_with, EpBounds, SampleMode};
pub use universe::can_certify;

use universe::{Env, Exact, Window};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value assigned to variable `{0}`")]
    MissingVariable(Var),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("witness search expects a formula of the form `E x ...`")]
    NotExistential,
    #[error("assignment line {line}: {reason}")]
    Assignment { line: usize, reason: String },
}

/// Kleene truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl Tri {
    pub fn definite(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Unknown => None,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        self.not().and(other.not()).not()
    }

    pub fn iff(self, other: Tri) -> Tri {
        match (self.definite(), other.definite()) {
            (Some(a), Some(b)) => Tri::from(a == b),
            _ => Tri::Unknown,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Unknown => "unknown",
        })
    }
}

/// Values for the free variables of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: BTreeMap<Var, EPSet>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn insert(&mut self, v: impl Into<Var>, s: EPSet) {
        self.bindings.insert(v.into(), s);
    }

    pub fn with(mut self, v: impl Into<Var>, s: EPSet) -> Assignment {
        self.insert(v, s);
        self
    }

    pub fn get(&self, v: &Var) -> Option<&EPSet> {
        self.bindings.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &EPSet)> {
        self.bindings.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Adds the bindings of `other`, which take precedence.
    pub fn extend(&mut self, other: Assignment) {
        self.bindings.extend(other.bindings);
    }

    fn env(&self) -> Env<EPSet> {
        self.bindings
            .iter()
            .map(|(v, s)| (v.clone(), s.clone()))
            .collect()
    }
}

impl FromIterator<(Var, EPSet)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, EPSet)>>(iter: I) -> Self {
        Assignment {
            bindings: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, s)) in self.bindings.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v} = {s}")?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = EvalError;

    /// One `var = EP{...}` binding per line; blank lines and `#` comments
    /// are ignored.
    fn from_str(s: &str) -> Result<Assignment, EvalError> {
        let mut out = Assignment::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| EvalError::Assignment {
                line: i + 1,
                reason,
            };
            let (name, set) = line
                .split_once('=')
                .ok_or_else(|| err("expected `var = EP{...}`".into()))?;
            let name = name.trim();
            let valid = name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
            if !valid {
                return Err(err(format!("`{name}` is not a variable name")));
            }
            let set: EPSet = set.trim().parse().map_err(|e: EpError| err(e.to_string()))?;
            out.insert(Var::new(name), set);
        }
        Ok(out)
    }
}

/// Evaluates a term to a set.
pub fn eval_term(t: &Term, sigma: &Assignment) -> Result<EPSet, EvalError> {
    universe::eval_term(&Exact, t, &sigma.env())
}

/// Standard satisfaction of a quantifier-free formula.
pub fn eval_qf(f: &Formula, sigma: &Assignment) -> Result<bool, EvalError> {
    universe::eval_qf(&Exact, f, &sigma.env())
}

/// Which sets the bounded search ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CandidateMode {
    All,
    /// Only finite and cofinite sets.
    FiniteCofinite,
}

/// Limits of the bounded search: candidate sets have threshold at most
/// `max_transient` and period at most `max_period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_transient: u64,
    pub max_period: u64,
    pub mode: CandidateMode,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_transient: 8,
            max_period: 6,
            mode: CandidateMode::All,
        }
    }
}

impl SearchBounds {
    pub fn new(max_transient: u64, max_period: u64) -> SearchBounds {
        SearchBounds {
            max_transient,
            max_period,
            mode: CandidateMode::All,
        }
    }

    pub fn finite_cofinite(self) -> SearchBounds {
        SearchBounds {
            mode: CandidateMode::FiniteCofinite,
            ..self
        }
    }
}

/// Subsets of `[0, n)` as sorted lists, in lexicographic order.
fn subsets_lex(n: u64) -> Vec<Vec<u64>> {
    fn go(start: u64, n: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(cur.clone());
        for next in start..n {
            cur.push(next);
            go(next + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// The search domain in enumeration order: by threshold, then period, then
/// transient set, then residue set. Each set appears once, at its canonical
/// description.
pub fn candidates(bounds: &SearchBounds) -> Arc<Vec<EPSet>> {
    static CACHE: OnceLock<Mutex<HashMap<SearchBounds, Arc<Vec<EPSet>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("cache lock").get(bounds) {
        return c.clone();
    }
    let mut out = Vec::new();
    for t in 0..=bounds.max_transient {
        let transients = subsets_lex(t);
        for p in 1..=bounds.max_period.max(1) {
            let residue_sets: Vec<Vec<u64>> = match bounds.mode {
                CandidateMode::All => subsets_lex(p),
                CandidateMode::FiniteCofinite => vec![vec![], (0..p).collect()],
            };
            for tr in &transients {
                for rs in &residue_sets {
                    let s = EPSet::new(tr.iter().copied(), t, p, rs.iter().copied())
                        .expect("in range by construction");
                    if s.threshold() == t && s.period() == p {
                        out.push(s);
                    }
                }
            }
        }
    }
    let out = Arc::new(out);
    cache
        .lock()
        .expect("cache lock")
        .insert(*bounds, out.clone());
    out
}

type Packed = Arc<(Window, Vec<u128>)>;

/// Candidates as bit windows, when the window fits in 128 bits.
fn packed_candidates(bounds: &SearchBounds, threshold: u64, period: u64) -> Option<Packed> {
    static CACHE: OnceLock<Mutex<HashMap<(SearchBounds, u64, u64), Packed>>> = OnceLock::new();
    let window = Window::new(threshold, period)?;
    let cache = CACHE.get_or_init(Default::default);
    let key = (*bounds, threshold, period);
    if let Some(c) = cache.lock().expect("cache lock").get(&key) {
        return Some(c.clone());
    }
    let bits = candidates(bounds).iter().map(|s| window.pack(s)).collect();
    let packed = Arc::new((window, bits));
    cache.lock().expect("cache lock").insert(key, packed.clone());
    Some(packed)
}

/// A window covering the assignment and every candidate, if one fits.
fn window_for(sigma: &Assignment, bounds: &SearchBounds) -> Option<Packed> {
    let mut threshold = bounds.max_transient;
    let mut period = (1..=bounds.max_period.max(1)).fold(1u64, |acc, p| acc.lcm(&p));
    for (_, s) in sigma.iter() {
        threshold = threshold.max(s.threshold());
        period = period.lcm(&s.period());
        if threshold + period > 128 {
            return None;
        }
    }
    packed_candidates(bounds, threshold, period)
}

/// Three-valued evaluation with quantifiers interpreted by bounded search.
pub fn eval_bounded(f: &Formula, sigma: &Assignment, bounds: &SearchBounds) -> Result<Tri, EvalError> {
    if let Some(packed) = window_for(sigma, bounds) {
        let (w, cands) = &*packed;
        let mut env: Env<u128> = sigma.iter().map(|(v, s)| (v.clone(), w.pack(s))).collect();
        return universe::eval_tri(w, f, &mut env, cands);
    }
    let cands = candidates(bounds);
    universe::eval_tri(&Exact, f, &mut sigma.env(), &cands)
}

/// The outcome of a witness search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    Found(EPSet),
    Inconclusive,
}

/// Looks for a value of `x` making the body of `∃x ψ` true, in enumeration
/// order. A found witness is always genuine; failure is inconclusive.
pub fn witness_search(
    f: &Formula,
    sigma: &Assignment,
    bounds: &SearchBounds,
) -> Result<Witness, EvalError> {
    let Formula::Exists(v, body) = f else {
        return Err(EvalError::NotExistential);
    };
    let hit = if let Some(packed) = window_for(sigma, bounds) {
        let (w, cands) = &*packed;
        let mut env: Env<u128> = sigma.iter().map(|(v, s)| (v.clone(), w.pack(s))).collect();
        universe::find(w, v, body, &mut env, cands, Tri::True)?
    } else {
        let cands = candidates(bounds);
        universe::find(&Exact, v, body, &mut sigma.env(), &cands, Tri::True)?
    };
    Ok(match hit {
        Some(i) => Witness::Found(candidates(bounds)[i].clone()),
        None => Witness::Inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn evens() -> EPSet {
        EPSet::periodic(2, [0])
    }

    #[test]
    fn qf_examples() {
        let s = Assignment::new().with("x", evens());
        assert!(!eval_qf(&parse("Fin(x)").unwrap(), &s).unwrap());
        let s = Assignment::new().with("x", EPSet::finite([0, 1]));
        assert!(eval_qf(&parse("Res[2,0](x)").unwrap(), &s).unwrap());
        let s = Assignment::new()
            .with("x", EPSet::finite([0]))
            .with("y", EPSet::finite([5, 9]));
        assert!(eval_qf(&parse("C[3](x | y)").unwrap(), &s).unwrap());
        assert_eq!(
            eval_qf(&parse("Fin(z)").unwrap(), &s),
            Err(EvalError::MissingVariable(Var::new("z")))
        );
    }

    #[test]
    fn first_witness_in_order() {
        let f = parse("E x (C[2](x) & ~C[3](x) & Res[2,0](x))").unwrap();
        let w = witness_search(&f, &Assignment::new(), &SearchBounds::default()).unwrap();
        assert_eq!(w, Witness::Found(EPSet::finite([0, 1])));
        assert_eq!(
            match w {
                Witness::Found(s) => s.to_string(),
                Witness::Inconclusive => String::new(),
            },
            "EP{transient=[0,1]; T=2; p=1; R=[]}"
        );
    }

    #[test]
    fn contradictions_are_inconclusive() {
        let f = parse("E x (Fin(x) & ~Fin(x))").unwrap();
        for b in [SearchBounds::new(2, 2), SearchBounds::new(4, 3)] {
            assert_eq!(
                witness_search(&f, &Assignment::new(), &b).unwrap(),
                Witness::Inconclusive
            );
        }
    }

    #[test]
    fn evens_split_into_multiples_of_four() {
        let f = parse("E y (y < x & ~Fin(y) & ~Fin(x - y))").unwrap();
        let s = Assignment::new().with("x", evens());
        let w = witness_search(&f, &s, &SearchBounds::default()).unwrap();
        assert_eq!(w, Witness::Found(EPSet::periodic(4, [0])));
    }

    #[test]
    fn enumeration_is_canonical_and_ordered() {
        let b = SearchBounds::new(3, 3);
        let c = candidates(&b);
        let distinct: std::collections::BTreeSet<&EPSet> = c.iter().collect();
        assert_eq!(distinct.len(), c.len());
        assert_eq!(c[0], EPSet::empty());
        assert!(c
            .windows(2)
            .all(|w| (w[0].threshold(), w[0].period()) <= (w[1].threshold(), w[1].period())));
        let fc = candidates(&b.finite_cofinite());
        assert!(fc.iter().all(EPSet::is_finite_or_cofinite));
        assert!(fc.iter().all(|s| c.contains(s)));
    }

    #[test]
    fn bounded_evaluation_is_one_sided() {
        let s = Assignment::new();
        let b = SearchBounds::new(2, 2);
        assert_eq!(eval_bounded(&parse("E x Fin(x)").unwrap(), &s, &b).unwrap(), Tri::True);
        assert_eq!(
            eval_bounded(&parse("E x (Fin(x) & ~Fin(x))").unwrap(), &s, &b).unwrap(),
            Tri::Unknown
        );
        assert_eq!(
            eval_bounded(&parse("A x Fin(x)").unwrap(), &s, &b).unwrap(),
            Tri::False
        );
        assert_eq!(
            eval_bounded(&parse("~(E x (Fin(x) & ~Fin(x)))").unwrap(), &s, &b).unwrap(),
            Tri::Unknown
        );
    }

    #[test]
    fn packed_and_exact_agree() {
        let f = parse("A y (y <= x -> E z (z <= y & Res[2,0](z) & C[1](z) | y = 0))").unwrap();
        let b = SearchBounds::new(2, 2);
        for x in candidates(&SearchBounds::new(3, 3)).iter().take(40) {
            let s = Assignment::new().with("x", x.clone());
            let fast = eval_bounded(&f, &s, &b).unwrap();
            let slow = universe::eval_tri(&Exact, &f, &mut s.env(), &candidates(&b)).unwrap();
            assert_eq!(fast, slow, "{x}");
        }
    }

    #[test]
    fn assignment_text() {
        let a: Assignment = "# two sets\nx = EP{transient=[]; T=0; p=2; R=[0]}\n\ny = EP{transient=[3]; T=4; p=1; R=[]}"
            .parse()
            .unwrap();
        assert_eq!(a.get(&Var::new("x")), Some(&evens()));
        assert_eq!(a.to_string().parse::<Assignment>().unwrap(), a);
        assert!(matches!(
            "x EP{}".parse::<Assignment>(),
            Err(EvalError::Assignment { line: 1, .. })
        ));
    }
}
