use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;

use crate::ast::{fresh_name, Atom, Formula, Level, Minterm, Term, Var};
use crate::qe::{Domain, Manager, NodeId, QeError};

use super::HarnessError;

/// The candidate space for definability checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub level: Level,
    /// Largest formula size, counting connective, quantifier and atom nodes.
    pub size: usize,
    pub vars: Vec<Var>,
    /// Count predicates `C[1]` to `C[max_count]`.
    pub max_count: u32,
    /// Moduli for `Res` atoms; only used at level `L3`.
    pub moduli: Vec<u32>,
    /// Quantifier nesting depth of candidates.
    pub quantifiers: usize,
    /// Largest size of a quantified body.
    pub body_size: usize,
}

impl EnumerationSpec {
    pub fn new(level: Level, size: usize, vars: Vec<Var>) -> EnumerationSpec {
        EnumerationSpec {
            level,
            size,
            vars,
            max_count: 4,
            moduli: Vec::new(),
            quantifiers: 1,
            body_size: 3,
        }
    }

    fn moduli_lcm(&self) -> u32 {
        if self.level < Level::L3 {
            return 1;
        }
        self.moduli.iter().fold(1, |l, &m| l.lcm(&m))
    }

    /// A domain in which every candidate is evaluated exactly.
    pub fn domain(&self) -> Domain {
        let l = self.moduli_lcm();
        let mut k = self.max_count.max(1);
        for _ in 0..self.quantifiers {
            k = 2 * k + l - 1;
        }
        if self.level == Level::L1 {
            Domain::counts_only(k)
        } else {
            Domain::new(k, l)
        }
    }

    fn predicates(&self, t: &Term) -> Vec<Atom> {
        let mut out = vec![Atom::IsZero(t.clone())];
        for k in 1..=self.max_count {
            out.push(Atom::at_least(k, t.clone()).expect("k >= 1"));
        }
        if self.level >= Level::L2 {
            out.push(Atom::Fin(t.clone()));
        }
        if self.level >= Level::L3 {
            let moduli: BTreeSet<u32> = self.moduli.iter().copied().collect();
            for n in moduli {
                for r in 0..n {
                    out.push(Atom::res(n, r as i64, t.clone()).expect("n >= 1"));
                }
            }
        }
        out
    }
}

/// How a candidate is built from earlier ones. Candidates live in one arena
/// and only the survivors of deduplication are turned into formulas.
enum Recipe {
    Leaf(Formula),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Exists(Var, u32),
    Forall(Var, u32),
}

/// Candidates by size: arena index and diagram, restricted to realizable
/// cells.
type Levels = Vec<Vec<(u32, NodeId)>>;

/// Every non-constant term over `vars`, as unions of minterms.
fn terms(vars: &[Var]) -> Vec<Term> {
    let cells = 1usize << vars.len();
    (1..(1u64 << cells) - 1)
        .map(|bits| {
            (0..cells)
                .filter(|i| bits >> i & 1 == 1)
                .fold(Term::zero(), |t, i| &t + &Minterm::new(i, vars.len()).term(vars))
        })
        .collect()
}

struct Enumerator<'a> {
    spec: &'a EnumerationSpec,
    m: &'a mut Manager,
    arena: Vec<Recipe>,
}

impl Enumerator<'_> {
    fn formula(&self, id: u32) -> Formula {
        match &self.arena[id as usize] {
            Recipe::Leaf(f) => f.clone(),
            Recipe::Not(a) => Formula::not(self.formula(*a)),
            Recipe::And(a, b) => Formula::and(self.formula(*a), self.formula(*b)),
            Recipe::Or(a, b) => Formula::or(self.formula(*a), self.formula(*b)),
            Recipe::Exists(v, a) => Formula::exists(v.clone(), self.formula(*a)),
            Recipe::Forall(v, a) => Formula::forall(v.clone(), self.formula(*a)),
        }
    }

    fn scope(&mut self, vars: &[Var], size: usize, depth: usize) -> Result<Levels, QeError> {
        let w = vars.len();
        let real = self.m.realizable(w);
        let mut seen: HashSet<NodeId> = HashSet::new();
        let mut levels: Levels = vec![Vec::new(); size + 1];
        if size == 0 {
            return Ok(levels);
        }
        let mut leaves = vec![(Formula::Const(true), real), (Formula::Const(false), Manager::constant(false))];
        for t in terms(vars) {
            for a in self.spec.predicates(&t) {
                let d = self.m.atom(&a, vars)?;
                leaves.push((Formula::atom(a), self.m.and(d, real)));
            }
        }
        for (f, node) in leaves {
            if seen.insert(node) {
                levels[1].push((self.arena.len() as u32, node));
                self.arena.push(Recipe::Leaf(f));
            }
        }
        let bodies = if depth > 0 && size > 1 {
            let taken: BTreeSet<Var> = vars.iter().cloned().collect();
            let v = fresh_name(&Var::new("y"), &taken);
            let mut inner = vars.to_vec();
            inner.push(v.clone());
            let b = self.scope(&inner, (size - 1).min(self.spec.body_size), depth - 1)?;
            Some((v, b))
        } else {
            None
        };
        for s in 2..=size {
            let mut fresh = Vec::new();
            let mut keep = |node: NodeId, r: Recipe| {
                if seen.insert(node) {
                    fresh.push((r, node));
                }
            };
            for &(f, d) in &levels[s - 1] {
                let n = self.m.not(d);
                keep(self.m.and(n, real), Recipe::Not(f));
            }
            for a in 1..s - 1 {
                let b = s - 1 - a;
                if a > b {
                    break;
                }
                for (i, &(f, df)) in levels[a].iter().enumerate() {
                    let start = if a == b { i + 1 } else { 0 };
                    for &(g, dg) in &levels[b][start..] {
                        keep(self.m.and(df, dg), Recipe::And(f, g));
                        keep(self.m.or(df, dg), Recipe::Or(f, g));
                    }
                }
            }
            if let Some((v, body)) = &bodies {
                let inner_real = self.m.realizable(w + 1);
                for &(g, dg) in body.get(s - 1).into_iter().flatten() {
                    keep(self.m.project(dg), Recipe::Exists(v.clone(), g));
                    let ng = self.m.not(dg);
                    let ng = self.m.and(ng, inner_real);
                    let pe = self.m.project(ng);
                    let a = self.m.not(pe);
                    keep(self.m.and(a, real), Recipe::Forall(v.clone(), g));
                }
            }
            for (r, node) in fresh {
                levels[s].push((self.arena.len() as u32, node));
                self.arena.push(r);
            }
        }
        Ok(levels)
    }
}

/// Runs the enumeration and hands each candidate, in order, to `visit`
/// until it returns `false`. Returns the number of candidates visited.
fn enumerate_in(
    m: &mut Manager,
    spec: &EnumerationSpec,
    mut visit: impl FnMut(NodeId, &dyn Fn() -> Formula) -> bool,
) -> Result<usize, QeError> {
    let mut e = Enumerator {
        spec,
        m,
        arena: Vec::new(),
    };
    let levels = e.scope(&spec.vars, spec.size, spec.quantifiers)?;
    let mut visited = 0;
    for &(id, node) in levels.iter().flatten() {
        visited += 1;
        if !visit(node, &|| e.formula(id)) {
            break;
        }
    }
    Ok(visited)
}

/// All formulas within the budget, by increasing size, keeping only the
/// first of each class of equivalent formulas.
pub fn enumerate_formulas(spec: &EnumerationSpec) -> Result<Vec<Formula>, HarnessError> {
    let mut m = Manager::new(spec.domain());
    let mut out = Vec::new();
    enumerate_in(&mut m, spec, |_, f| {
        out.push(f());
        true
    })?;
    Ok(out)
}

/// Outcome of a definability search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definability {
    /// No candidate is equivalent to the target.
    NotDefinable { checked: usize },
    /// The first equivalent candidate, found after `checked` comparisons.
    DefinableBy { formula: Formula, checked: usize },
}

impl Definability {
    pub fn is_definable(&self) -> bool {
        matches!(self, Definability::DefinableBy { .. })
    }

    pub fn checked(&self) -> usize {
        match self {
            Definability::NotDefinable { checked } | Definability::DefinableBy { checked, .. } => *checked,
        }
    }
}

fn check_vars(target: &Formula, vars: &[Var]) -> Result<(), HarnessError> {
    let free = target.free_vars();
    if free.iter().any(|v| !vars.contains(v)) {
        let names: Vec<&str> = free.iter().map(Var::as_str).collect();
        return Err(HarnessError::Variables(format!(
            "target has free variables {{{}}}, candidates use {{{}}}",
            names.join(", "),
            vars.iter().map(Var::as_str).collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(())
}

/// Compares the target against every enumerated candidate in order.
pub fn defcheck(target: &Formula, spec: &EnumerationSpec) -> Result<Definability, HarnessError> {
    check_vars(target, &spec.vars)?;
    let mut m = Manager::new(spec.domain().join(Domain::for_formula(target)));
    let real = m.realizable(spec.vars.len());
    let t = m.compile(&target.rectify(), &spec.vars)?;
    let key = m.and(t, real);
    let mut found = None;
    let checked = enumerate_in(&mut m, spec, |node, f| {
        if node == key {
            found = Some(f());
        }
        found.is_none()
    })?;
    Ok(match found {
        Some(formula) => Definability::DefinableBy { formula, checked },
        None => Definability::NotDefinable { checked },
    })
}

/// As [`defcheck`] over an explicit candidate list.
pub fn defcheck_candidates(target: &Formula, candidates: &[Formula]) -> Result<Definability, HarnessError> {
    for (i, c) in candidates.iter().enumerate() {
        if crate::qe::equivalent(c, target)?.equivalent {
            return Ok(Definability::DefinableBy {
                formula: c.clone(),
                checked: i + 1,
            });
        }
    }
    Ok(Definability::NotDefinable {
        checked: candidates.len(),
    })
}
