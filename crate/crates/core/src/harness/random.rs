use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{fresh_name, Atom, Formula, Level, Term, Var};

/// Shape of random formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaSpec {
    pub level: Level,
    /// Pool of free variables.
    pub vars: Vec<Var>,
    /// Free and bound variables together.
    pub max_vars: usize,
    pub max_depth: usize,
    pub max_size: usize,
    pub max_count: u32,
    pub moduli: Vec<u32>,
}

impl FormulaSpec {
    /// Up to three variables, quantifier depth two, size twelve.
    pub fn new(level: Level) -> FormulaSpec {
        FormulaSpec {
            level,
            vars: ["x", "y", "z"].iter().map(|v| Var::new(v)).collect(),
            max_vars: 3,
            max_depth: 2,
            max_size: 12,
            max_count: 3,
            moduli: vec![2, 3, 4],
        }
    }
}

fn random_term<R: Rng + ?Sized>(rng: &mut R, scope: &[Var], depth: u32) -> Term {
    if scope.is_empty() {
        return if rng.gen_bool(0.5) { Term::one() } else { Term::zero() };
    }
    if depth == 0 || rng.gen_bool(0.45) {
        return match rng.gen_range(0..12) {
            0 => Term::one(),
            1 => Term::zero(),
            // Favour the innermost variable so quantifiers bind something.
            2..=5 => Term::var(scope[scope.len() - 1].clone()),
            _ => Term::var(scope.choose(rng).expect("nonempty").clone()),
        };
    }
    let a = random_term(rng, scope, depth - 1);
    match rng.gen_range(0..3) {
        0 => a.complement(),
        1 => &a * &random_term(rng, scope, depth - 1),
        _ => &a + &random_term(rng, scope, depth - 1),
    }
}

fn random_atom<R: Rng + ?Sized>(rng: &mut R, spec: &FormulaSpec, scope: &[Var]) -> Formula {
    let t = random_term(rng, scope, 2);
    let kinds = match spec.level {
        Level::L1 => 2,
        Level::L2 => 3,
        Level::L3 if spec.moduli.is_empty() => 3,
        Level::L3 => 4,
    };
    Formula::atom(match rng.gen_range(0..kinds) {
        0 => Atom::IsZero(t),
        1 => Atom::at_least(rng.gen_range(1..=spec.max_count.max(1)), t).expect("k >= 1"),
        2 => Atom::Fin(t),
        _ => {
            let n = *spec.moduli.choose(rng).expect("nonempty");
            Atom::res(n, rng.gen_range(0..n) as i64, t).expect("n >= 1")
        }
    })
}

fn bound_name(scope: &[Var]) -> Var {
    let taken: BTreeSet<Var> = scope.iter().cloned().collect();
    ["u", "v", "w"]
        .iter()
        .map(|n| Var::new(n))
        .find(|v| !taken.contains(v))
        .unwrap_or_else(|| fresh_name(&Var::new("u"), &taken))
}

fn gen<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &FormulaSpec,
    scope: &[Var],
    size: usize,
    depth: usize,
) -> Formula {
    let can_bind = depth > 0 && scope.len() < spec.max_vars && size >= 2;
    if size <= 1 {
        return random_atom(rng, spec, scope);
    }
    let roll = rng.gen_range(0..10);
    if can_bind && roll < 3 {
        let v = bound_name(scope);
        let mut inner = scope.to_vec();
        inner.push(v.clone());
        let body = gen(rng, spec, &inner, size - 1, depth - 1);
        return if rng.gen_bool(0.5) {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        };
    }
    if size == 2 || roll < 5 {
        return Formula::not(gen(rng, spec, scope, size - 1, depth));
    }
    let left = rng.gen_range(1..size - 1);
    let a = gen(rng, spec, scope, left, depth);
    let b = gen(rng, spec, scope, size - 1 - left, depth);
    match rng.gen_range(0..6) {
        0 | 1 => Formula::and(a, b),
        2 | 3 => Formula::or(a, b),
        4 => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

/// A formula whose free variables come from the pool.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, spec: &FormulaSpec) -> Formula {
    let nfree = rng.gen_range(1..=spec.vars.len().min(spec.max_vars).max(1));
    let scope: Vec<Var> = spec.vars.iter().take(nfree).cloned().collect();
    let size = rng.gen_range(1..=spec.max_size);
    gen(rng, spec, &scope, size, spec.max_depth)
}

/// A sentence: a formula over fresh variables, closed by one to
/// `max_depth` outer quantifiers.
pub fn random_sentence<R: Rng + ?Sized>(rng: &mut R, spec: &FormulaSpec) -> Formula {
    let outer = rng.gen_range(1..=spec.max_depth.min(spec.max_vars).max(1));
    let scope: Vec<Var> = spec.vars.iter().take(outer).cloned().collect();
    let size = rng.gen_range(outer + 1..=spec.max_size.max(outer + 1));
    let mut f = gen(rng, spec, &scope, size - outer, spec.max_depth - outer);
    for v in scope.into_iter().rev() {
        f = if rng.gen_bool(0.5) {
            Formula::exists(v, f)
        } else {
            Formula::forall(v, f)
        };
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_the_spec() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for level in [Level::L1, Level::L2, Level::L3] {
            let spec = FormulaSpec::new(level);
            for _ in 0..300 {
                let f = random_formula(&mut rng, &spec);
                assert!(f.level() <= level);
                assert!(f.quantifier_depth() <= 2 && f.size() <= 12);
                assert!(f.all_vars().len() <= 3, "{f}");
                let s = random_sentence(&mut rng, &spec);
                assert!(s.is_sentence() && s.quantifier_depth() <= 2 && s.size() <= 12, "{s}");
            }
        }
    }
}
