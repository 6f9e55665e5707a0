//! Quantifier elimination, sentence decision and equivalence.

mod diagram;
mod dnf;
mod domain;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Formula, Level, Var};
use crate::syntax::print;

pub use diagram::{Manager, NodeId, MAX_WIDTH};
use diagram::Elimination;
pub use dnf::{eliminate_all_dnf, eliminate_one};
pub use domain::{Domain, Label};

/// The theory a formula is read in. Vocabularies grow from `T1` to `T3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theory {
    T1,
    T2,
    T3,
}

impl Theory {
    pub fn level(self) -> Level {
        match self {
            Theory::T1 => Level::L1,
            Theory::T2 => Level::L2,
            Theory::T3 => Level::L3,
        }
    }

    pub fn for_level(level: Level) -> Theory {
        match level {
            Level::L1 => Theory::T1,
            Level::L2 => Theory::T2,
            Level::L3 => Theory::T3,
        }
    }

    pub fn admits(self, f: &Formula) -> bool {
        f.level() <= self.level()
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::T1 => "T1",
            Theory::T2 => "T2",
            Theory::T3 => "T3",
        })
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Theory, String> {
        match s {
            "T1" | "t1" => Ok(Theory::T1),
            "T2" | "t2" => Ok(Theory::T2),
            "T3" | "t3" => Ok(Theory::T3),
            _ => Err(format!("unknown theory `{s}` (expected T1, T2 or T3)")),
        }
    }
}

/// The truth value of a sentence, with the elimination steps if requested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: bool,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QeError {
    #[error("formula uses {level} vocabulary, which {theory} does not have")]
    LevelTooHigh { level: Level, theory: Theory },
    #[error("not a sentence: free variable(s) {0}")]
    NotSentence(String),
    #[error("expected a quantifier-free formula without variables")]
    NotClosed,
    #[error("expected `E x ψ` with ψ quantifier-free")]
    NotInnermost,
    #[error("{0} variables in one scope, more than the limit of {MAX_WIDTH}")]
    TooManyVariables(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

pub(crate) fn check_level(f: &Formula, theory: Theory) -> Result<(), QeError> {
    let level = f.level();
    if level > theory.level() {
        return Err(QeError::LevelTooHigh { level, theory });
    }
    Ok(())
}

/// Compiles a rectified formula over its sorted free variables.
fn compile(
    f: &Formula,
    trace: &mut Option<Vec<Elimination>>,
) -> Result<(Manager, NodeId, Vec<Var>), QeError> {
    let vars: Vec<Var> = f.free_vars().into_iter().collect();
    let mut m = Manager::new(Domain::for_formula(f));
    let root = m.compile_traced(f, &vars, trace)?;
    Ok((m, root, vars))
}

/// A quantifier-free formula in the free variables of `f`, equivalent to it
/// in the theory.
pub fn eliminate_all(f: &Formula, theory: Theory) -> Result<Formula, QeError> {
    Ok(eliminate_all_traced(f, theory, false)?.0)
}

/// As [`eliminate_all`], optionally listing each eliminated quantifier with
/// the quantifier-free formula it became, innermost first.
pub fn eliminate_all_traced(
    f: &Formula,
    theory: Theory,
    want_trace: bool,
) -> Result<(Formula, Vec<String>), QeError> {
    check_level(f, theory)?;
    let f = f.rectify();
    if f.is_quantifier_free() {
        return Ok((f, Vec::new()));
    }
    let mut steps = want_trace.then(Vec::new);
    let (m, root, vars) = compile(&f, &mut steps)?;
    let trace = steps
        .unwrap_or_default()
        .into_iter()
        .map(|(scope, v, exists, node)| {
            let q = if exists { "E" } else { "A" };
            format!("{q} {v}: {}", print(&synth::synthesize(&m, node, &scope)))
        })
        .collect();
    Ok((synth::synthesize(&m, root, &vars), trace))
}

/// Truth value of a quantifier-free formula whose terms are `0` or `1`.
pub fn eval_closed(f: &Formula) -> Result<bool, QeError> {
    Ok(match f {
        Formula::Const(b) => *b,
        Formula::Atom(a) => a.closed_value().ok_or(QeError::NotClosed)?,
        Formula::Not(g) => !eval_closed(g)?,
        Formula::And(a, b) => eval_closed(a)? && eval_closed(b)?,
        Formula::Or(a, b) => eval_closed(a)? || eval_closed(b)?,
        Formula::Implies(a, b) => !eval_closed(a)? || eval_closed(b)?,
        Formula::Iff(a, b) => eval_closed(a)? == eval_closed(b)?,
        Formula::Exists(..) | Formula::Forall(..) => return Err(QeError::NotClosed),
    })
}

pub fn decide(sentence: &Formula, theory: Theory) -> Result<Verdict, QeError> {
    decide_traced(sentence, theory, false)
}

/// Eliminates all quantifiers of a sentence and evaluates the closed
/// result.
pub fn decide_traced(sentence: &Formula, theory: Theory, want_trace: bool) -> Result<Verdict, QeError> {
    check_level(sentence, theory)?;
    let free = sentence.free_vars();
    if !free.is_empty() {
        let names: Vec<&str> = free.iter().map(Var::as_str).collect();
        return Err(QeError::NotSentence(names.join(", ")));
    }
    let (qf, mut trace) = eliminate_all_traced(sentence, theory, want_trace)?;
    let value = eval_closed(&qf)?;
    if want_trace {
        trace.push(format!("closed: {} = {value}", print(&qf)));
    }
    Ok(Verdict { value, trace })
}

/// Outcome of comparing two formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// The theory the comparison ran in: the higher of the two levels.
    pub theory: Theory,
    pub levels: (Level, Level),
}

impl Equivalence {
    /// The formulas come from different vocabularies.
    pub fn level_mismatch(&self) -> bool {
        self.levels.0 != self.levels.1
    }
}

/// Whether the universal closure of `a ↔ b` holds, read in the least theory
/// containing both formulas.
pub fn equivalent(a: &Formula, b: &Formula) -> Result<Equivalence, QeError> {
    let levels = (a.level(), b.level());
    let theory = Theory::for_level(levels.0.max(levels.1));
    let mut m = Manager::new(Domain::for_formula(a).join(Domain::for_formula(b)));
    Ok(Equivalence {
        equivalent: equivalent_in(&mut m, a, b)?,
        theory,
        levels,
    })
}

/// [`equivalent`] within an existing manager, whose domain must cover
/// both formulas. Reusing a manager shares work across many comparisons.
pub fn equivalent_in(m: &mut Manager, a: &Formula, b: &Formula) -> Result<bool, QeError> {
    let iff = Formula::iff(a.clone(), b.clone()).rectify();
    let vars: Vec<Var> = iff.free_vars().into_iter().collect();
    let Formula::Iff(a, b) = &iff else { unreachable!() };
    let da = m.compile(a, &vars)?;
    let db = m.compile(b, &vars)?;
    let x = m.xor(da, db);
    let r = m.realizable(vars.len());
    Ok(m.and(x, r) == diagram::FALSE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn eliminate_examples() {
        let f = p("E x (C[1](x . y) & C[1]((1 + x) . y))");
        assert_eq!(print(&eliminate_all(&f, Theory::T1).unwrap()), "C[2](y)");
        let g = p("E x (x . y = x & ~(x = 0) & ~(x = y) & ~Fin(x) & ~Fin(y + x))");
        assert_eq!(print(&eliminate_all(&g, Theory::T2).unwrap()), "~Fin(y)");
        assert_eq!(eliminate_all(&p("E x (x = y)"), Theory::T1).unwrap(), Formula::Const(true));
    }

    #[test]
    fn decide_examples() {
        assert!(!decide(&p("Fin(1)"), Theory::T2).unwrap().value);
        assert!(!decide(&p("C[1](0)"), Theory::T1).unwrap().value);
        assert!(decide(&p("A x (Res[2,0](x) -> Fin(x))"), Theory::T3).unwrap().value);
        assert!(decide(&p("E x (C[2](x) & ~C[3](x) & Res[2,0](x))"), Theory::T3).unwrap().value);
        let main = p("A x (~Fin(x) -> E y (y . x = y & ~Fin(y) & ~Fin(x + y)))");
        assert!(decide(&main, Theory::T2).unwrap().value);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            decide(&p("Fin(1)"), Theory::T1),
            Err(QeError::LevelTooHigh { .. })
        ));
        assert!(matches!(decide(&p("C[1](x)"), Theory::T1), Err(QeError::NotSentence(_))));
        assert!(matches!(
            eliminate_one(&p("E x E y (x = y)"), Theory::T1),
            Err(QeError::NotInnermost)
        ));
    }

    #[test]
    fn equivalence_examples() {
        let e = equivalent(&p("Res[2,1](x)"), &p("Res[4,1](x) | Res[4,3](x)")).unwrap();
        assert!(e.equivalent && e.theory == Theory::T3);
        assert!(!equivalent(&p("Fin(x)"), &p("C[1](x)")).unwrap().equivalent);
        let e = equivalent(&p("Fin(x)"), &p("Fin(x)")).unwrap();
        assert!(e.equivalent && !e.level_mismatch());
    }

    #[test]
    fn trace_lists_each_quantifier() {
        let v = decide_traced(&p("A x E y (y = x)"), Theory::T1, true).unwrap();
        assert!(v.value);
        assert_eq!(v.trace.len(), 3);
        assert!(v.trace[0].starts_with("E y:"));
    }

    /// The diagram engine and the table engine agree.
    #[test]
    fn engines_agree() {
        let srcs = [
            "E x (C[1](x . y) & C[1]((1 + x) . y))",
            "E x (Res[3,1](x . y) & ~Fin(y . (1 + x)) & C[2](z . x))",
            "A x (Fin(x . y) | Res[2,0](x))",
            "E x (x . y = 0 & Res[2,1](x) & ~C[3](x + z))",
        ];
        for src in srcs {
            let f = p(src);
            let a = eliminate_all(&f, Theory::T3).unwrap();
            let b = eliminate_all_dnf(&f, Theory::T3).unwrap();
            assert!(equivalent(&a, &b).unwrap().equivalent, "{src}: {a} vs {b}");
        }
    }
}
