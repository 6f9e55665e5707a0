//! Elimination of one existential through disjunctive normal form and
//! split projection. Exponential, but each step is a direct rewrite, so it
//! serves as an independent check on the diagram engine.

use std::collections::HashMap;

use crate::ast::{Formula, Minterm, Var};
use crate::descriptor::{
    atom_condition, negate_atom, product, project_split, MintermTable, SplitSpec,
};

use super::synth::{and2, not1, or2};
use super::{check_level, QeError, Theory};

type Cache = HashMap<(Formula, bool), Vec<MintermTable>>;

/// The formula (or its negation, when `positive` is false) as a
/// disjunction of tables over `vars`.
fn tables(f: &Formula, positive: bool, vars: &[Var], cache: &mut Cache) -> Result<Vec<MintermTable>, QeError> {
    if let Some(t) = cache.get(&(f.clone(), positive)) {
        return Ok(t.clone());
    }
    let top = || vec![MintermTable::new(vars.to_vec())];
    let r = match (f, positive) {
        (Formula::Const(b), p) => {
            if *b == p {
                top()
            } else {
                vec![]
            }
        }
        (Formula::Atom(a), true) => MintermTable::expand_condition(&atom_condition(a), vars),
        (Formula::Atom(a), false) => MintermTable::expand_condition(&negate_atom(a), vars),
        (Formula::Not(g), p) => tables(g, !p, vars, cache)?,
        (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
            let ta = tables(a, positive, vars, cache)?;
            product(&ta, &tables(b, positive, vars, cache)?)
        }
        (Formula::Or(a, b), true) | (Formula::And(a, b), false) => {
            let mut ta = tables(a, positive, vars, cache)?;
            for t in tables(b, positive, vars, cache)? {
                if !ta.contains(&t) {
                    ta.push(t);
                }
            }
            ta
        }
        (Formula::Implies(a, b), p) => {
            let g = Formula::or(Formula::not((**a).clone()), (**b).clone());
            tables(&g, p, vars, cache)?
        }
        (Formula::Iff(a, b), p) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let g = Formula::or(
                Formula::and(a.clone(), b.clone()),
                Formula::and(Formula::not(a), Formula::not(b)),
            );
            tables(&g, p, vars, cache)?
        }
        (Formula::Exists(..) | Formula::Forall(..), _) => return Err(QeError::NotInnermost),
    };
    cache.insert((f.clone(), positive), r.clone());
    Ok(r)
}

/// Eliminates the quantifier of `E x ψ` with `ψ` quantifier-free.
pub fn eliminate_one(f: &Formula, theory: Theory) -> Result<Formula, QeError> {
    check_level(f, theory)?;
    let Formula::Exists(x, body) = f else {
        return Err(QeError::NotInnermost);
    };
    if !body.is_quantifier_free() {
        return Err(QeError::NotInnermost);
    }
    let outer: Vec<Var> = f.free_vars().into_iter().collect();
    if outer.len() + 1 > super::diagram::MAX_WIDTH {
        return Err(QeError::TooManyVariables(outer.len() + 1));
    }
    let mut vars = outer.clone();
    vars.push(x.clone());
    let w = outer.len();
    let mut result = Formula::Const(false);
    for t in tables(body, true, &vars, &mut HashMap::new())? {
        let mut conj = Formula::Const(true);
        for i in 0..1usize << w {
            let rest = t.get(Minterm::new(2 * i, w + 1));
            let part = t.get(Minterm::new(2 * i + 1, w + 1));
            if rest.is_trivial() && part.is_trivial() {
                continue;
            }
            let p = project_split(&SplitSpec::new(part, rest))
                .map_err(|e| QeError::Internal(e.to_string()))?;
            conj = and2(conj, p.to_formula(&Minterm::new(i, w).term(&outer)));
        }
        result = or2(result, conj);
    }
    Ok(result)
}

/// Innermost-first elimination by repeated [`eliminate_one`].
pub fn eliminate_all_dnf(f: &Formula, theory: Theory) -> Result<Formula, QeError> {
    check_level(f, theory)?;
    go(&f.rectify(), theory)
}

fn go(f: &Formula, theory: Theory) -> Result<Formula, QeError> {
    Ok(match f {
        Formula::Const(_) | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => not1(go(g, theory)?),
        Formula::And(a, b) => and2(go(a, theory)?, go(b, theory)?),
        Formula::Or(a, b) => or2(go(a, theory)?, go(b, theory)?),
        Formula::Implies(a, b) => Formula::implies(go(a, theory)?, go(b, theory)?),
        Formula::Iff(a, b) => Formula::iff(go(a, theory)?, go(b, theory)?),
        Formula::Exists(x, g) => eliminate_one(&Formula::exists(x.clone(), go(g, theory)?), theory)?,
        Formula::Forall(x, g) => {
            let inner = not1(go(g, theory)?);
            not1(eliminate_one(&Formula::exists(x.clone(), inner), theory)?)
        }
    })
}
