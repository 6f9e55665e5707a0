//! Decision diagrams over the cells of a variable list.
//!
//! A diagram of width `w` has one level per minterm cell (`2^w` levels, in
//! cell order) and represents a Boolean function of the cardinality classes
//! of the cells. Edges out of a node partition the classes; levels on which
//! the function does not depend are skipped. Nodes are hash-consed, so equal
//! functions have equal ids.

use std::collections::HashMap;
use std::sync::Arc;

use crate::ast::{decompose_atom, Atom, CellConstraint, Formula, Var};
use crate::descriptor::{project_split, SplitSpec};

use super::domain::{Domain, Label};
use super::QeError;

pub type NodeId = u32;

pub const FALSE: NodeId = 0;
pub const TRUE: NodeId = 1;
const TERMINAL_LEVEL: u32 = u32::MAX;

/// Widths above this would need more than 2^16 levels.
pub const MAX_WIDTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
}

#[derive(Clone, Debug)]
struct Node {
    level: u32,
    edges: Arc<[(Label, NodeId)]>,
}

/// One quantifier step: scope, bound variable, whether universal, result.
pub(crate) type Elimination = (Vec<Var>, Var, bool, NodeId);

/// Owns the nodes and caches of a family of diagrams over one [`Domain`].
pub struct Manager {
    domain: Domain,
    nodes: Vec<Node>,
    unique: HashMap<(u32, Arc<[(Label, NodeId)]>), NodeId>,
    apply_memo: HashMap<(Op, NodeId, NodeId), NodeId>,
    not_memo: HashMap<NodeId, NodeId>,
    project_memo: HashMap<NodeId, NodeId>,
    /// `sums[a][b]`: classes whose cardinalities are sums of one from `a`
    /// and one from `b`.
    sums: Vec<Vec<Label>>,
    full: Label,
}

impl Manager {
    pub fn new(domain: Domain) -> Manager {
        let n = domain.size();
        let terminal = |_| Node {
            level: TERMINAL_LEVEL,
            edges: Arc::new([]),
        };
        let sums = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let spec = SplitSpec::new(domain.descriptor(a), domain.descriptor(b));
                        let p = project_split(&spec).expect("class descriptors are satisfiable");
                        let mut l = Label::empty(n);
                        for c in 0..n {
                            let class = domain.descriptor(c);
                            if p.options.iter().any(|o| o.conjoin(&class).is_some()) {
                                l.insert(c);
                            }
                        }
                        l
                    })
                    .collect()
            })
            .collect();
        Manager {
            domain,
            nodes: (0..2).map(terminal).collect(),
            unique: HashMap::new(),
            apply_memo: HashMap::new(),
            not_memo: HashMap::new(),
            project_memo: HashMap::new(),
            sums,
            full: Label::full(n),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(b: bool) -> NodeId {
        if b {
            TRUE
        } else {
            FALSE
        }
    }

    pub(crate) fn level(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].level
    }

    pub(crate) fn edges(&self, id: NodeId) -> &[(Label, NodeId)] {
        &self.nodes[id as usize].edges
    }

    /// Edges of `id` viewed at `level`, which must not be below its own.
    fn edges_at(&self, id: NodeId, level: u32) -> Vec<(Label, NodeId)> {
        if self.level(id) == level {
            self.edges(id).to_vec()
        } else {
            vec![(self.full.clone(), id)]
        }
    }

    /// The unique node with these edges, merging edges to the same child.
    pub(crate) fn mk(&mut self, level: u32, edges: Vec<(Label, NodeId)>) -> NodeId {
        let mut merged: Vec<(Label, NodeId)> = Vec::with_capacity(edges.len());
        for (l, c) in edges {
            if l.is_empty() {
                continue;
            }
            match merged.iter_mut().find(|(_, d)| *d == c) {
                Some((m, _)) => m.union_with(&l),
                None => merged.push((l, c)),
            }
        }
        if merged.len() == 1 {
            debug_assert_eq!(merged[0].0, self.full);
            return merged[0].1;
        }
        debug_assert!(merged.iter().all(|&(_, c)| self.level(c) > level));
        merged.sort_by_key(|&(_, c)| c);
        let key: (u32, Arc<[(Label, NodeId)]>) = (level, merged.into());
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            level,
            edges: key.1.clone(),
        });
        self.unique.insert(key, id);
        id
    }

    /// True exactly when cell `level` has a class in `label`.
    pub fn guard(&mut self, level: u32, label: &Label, then: NodeId) -> NodeId {
        let rest = self.full.minus(label);
        self.mk(level, vec![(label.clone(), then), (rest, FALSE)])
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        match a {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_memo.get(&a) {
            return r;
        }
        let level = self.level(a);
        let edges: Vec<(Label, NodeId)> = self
            .edges(a)
            .to_vec()
            .into_iter()
            .map(|(l, c)| (l, self.not(c)))
            .collect();
        let r = self.mk(level, edges);
        self.not_memo.insert(a, r);
        self.not_memo.insert(r, a);
        r
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.apply(Op::And, a, b)
    }

    pub fn or(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.apply(Op::Or, a, b)
    }

    pub fn xor(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.apply(Op::Xor, a, b)
    }

    fn apply(&mut self, op: Op, a: NodeId, b: NodeId) -> NodeId {
        match (op, a, b) {
            (Op::And, FALSE, _) | (Op::And, _, FALSE) => return FALSE,
            (Op::And, TRUE, x) | (Op::And, x, TRUE) => return x,
            (Op::Or, TRUE, _) | (Op::Or, _, TRUE) => return TRUE,
            (Op::Or, FALSE, x) | (Op::Or, x, FALSE) => return x,
            (Op::Xor, FALSE, x) | (Op::Xor, x, FALSE) => return x,
            (Op::Xor, TRUE, x) | (Op::Xor, x, TRUE) => return self.not(x),
            _ => {}
        }
        if a == b {
            return if op == Op::Xor { FALSE } else { a };
        }
        let (a, b) = (a.min(b), a.max(b));
        if let Some(&r) = self.apply_memo.get(&(op, a, b)) {
            return r;
        }
        let level = self.level(a).min(self.level(b));
        let ea = self.edges_at(a, level);
        let eb = self.edges_at(b, level);
        let mut edges = Vec::new();
        for (la, ca) in &ea {
            for (lb, cb) in &eb {
                let l = la.intersect(lb);
                if !l.is_empty() {
                    let c = self.apply(op, *ca, *cb);
                    edges.push((l, c));
                }
            }
        }
        let r = self.mk(level, edges);
        self.apply_memo.insert((op, a, b), r);
        r
    }

    /// The diagram of an atom over the cells of `vars`.
    pub fn atom(&mut self, atom: &Atom, vars: &[Var]) -> Result<NodeId, QeError> {
        let fits = match atom {
            Atom::AtLeast(k, _) => *k <= self.domain.k,
            Atom::Res { modulus, .. } => self.domain.fin && self.domain.l % modulus == 0,
            Atom::Fin(_) => self.domain.fin,
            Atom::IsZero(_) => true,
        };
        if !fits {
            return Err(QeError::Internal(format!("{atom:?} does not fit {:?}", self.domain)));
        }
        let d = decompose_atom(atom, vars).map_err(|e| QeError::Internal(e.to_string()))?;
        let cells: Vec<u32> = d.cells.iter().map(|m| m.index() as u32).collect();
        let n = self.domain.size();
        let dom = self.domain;
        // Each class contributes a value to the running state; `None` means
        // the constraint fails outright.
        let step: Box<dyn Fn(u64, usize) -> Option<u64>> = match d.constraint {
            CellConstraint::AllZero => Box::new(|_, c| (c == 0).then_some(0)),
            CellConstraint::SumAtLeast(k) => {
                let k = k as u64;
                Box::new(move |s, c| {
                    let v = dom.representative(c).finite().unwrap_or(k);
                    Some((s + v).min(k))
                })
            }
            CellConstraint::AllFin => Box::new(move |_, c| (c != dom.inf()).then_some(0)),
            CellConstraint::FinResidue { modulus, .. } => {
                let m = modulus as u64;
                Box::new(move |s, c| dom.representative(c).finite().map(|v| (s + v) % m))
            }
        };
        let accept = |s: u64| match d.constraint {
            CellConstraint::AllZero | CellConstraint::AllFin => true,
            CellConstraint::SumAtLeast(k) => s >= k as u64,
            CellConstraint::FinResidue { residue, .. } => s == residue as u64,
        };
        let mut memo: HashMap<(usize, u64), NodeId> = HashMap::new();
        fn build(
            m: &mut Manager,
            i: usize,
            s: u64,
            cells: &[u32],
            n: usize,
            step: &dyn Fn(u64, usize) -> Option<u64>,
            accept: &dyn Fn(u64) -> bool,
            memo: &mut HashMap<(usize, u64), NodeId>,
        ) -> NodeId {
            if i == cells.len() {
                return Manager::constant(accept(s));
            }
            if let Some(&r) = memo.get(&(i, s)) {
                return r;
            }
            let mut edges = Vec::new();
            for c in 0..n {
                let child = match step(s, c) {
                    Some(t) => build(m, i + 1, t, cells, n, step, accept, memo),
                    None => FALSE,
                };
                edges.push((Label::single(n, c), child));
            }
            let r = m.mk(cells[i], edges);
            memo.insert((i, s), r);
            r
        }
        Ok(build(self, 0, 0, &cells, n, &*step, &accept, &mut memo))
    }

    /// Existential projection of the last variable: cells `2i` and `2i+1`
    /// of the input are the two halves of cell `i` of the output.
    pub fn project(&mut self, a: NodeId) -> NodeId {
        if a == FALSE || a == TRUE {
            return a;
        }
        if let Some(&r) = self.project_memo.get(&a) {
            return r;
        }
        let level = self.level(a);
        let old = level / 2;
        // Edges for the half not in the variable, then for the half in it.
        let outer = self.edges_at(a, 2 * old);
        let mut by_grandchild: Vec<(NodeId, Label)> = Vec::new();
        for (la, child) in outer {
            for (lb, g) in self.edges_at(child, 2 * old + 1) {
                let mut sum = Label::empty(self.domain.size());
                for x in la.iter() {
                    for y in lb.iter() {
                        sum.union_with(&self.sums[x][y]);
                    }
                }
                match by_grandchild.iter_mut().find(|(h, _)| *h == g) {
                    Some((_, l)) => l.union_with(&sum),
                    None => by_grandchild.push((g, sum)),
                }
            }
        }
        let mut r = FALSE;
        for (g, label) in by_grandchild {
            let pg = self.project(g);
            let guarded = self.guard(old, &label, pg);
            r = self.or(r, guarded);
        }
        self.project_memo.insert(a, r);
        r
    }

    /// True exactly when some cell of a width-`w` space is infinite, which
    /// every actual assignment satisfies since the cells cover `1`.
    pub fn realizable(&mut self, width: usize) -> NodeId {
        let inf = Label::single(self.domain.size(), self.domain.inf());
        let rest = self.full.minus(&inf);
        let mut r = FALSE;
        for level in (0..1u32 << width).rev() {
            r = self.mk(level, vec![(inf.clone(), TRUE), (rest.clone(), r)]);
        }
        r
    }

    /// Evaluates a diagram at a vector of cell classes.
    pub fn eval(&self, mut a: NodeId, classes: &[usize]) -> bool {
        while a != TRUE && a != FALSE {
            let c = classes[self.level(a) as usize];
            a = self
                .edges(a)
                .iter()
                .find(|(l, _)| l.contains(c))
                .map(|&(_, n)| n)
                .expect("edges partition the classes");
        }
        a == TRUE
    }

    /// Compiles a formula over the cells of `vars`. Quantified variables are
    /// appended to the variable list for their scope, so each quantifier
    /// eliminates the last variable. Bound variables must be distinct from
    /// each other and from `vars`.
    pub fn compile(&mut self, f: &Formula, vars: &[Var]) -> Result<NodeId, QeError> {
        self.compile_traced(f, vars, &mut None)
    }

    /// As [`Manager::compile`], recording `(scope, variable, is_exists,
    /// result)` for every eliminated quantifier, innermost first.
    pub(crate) fn compile_traced(
        &mut self,
        f: &Formula,
        vars: &[Var],
        trace: &mut Option<Vec<Elimination>>,
    ) -> Result<NodeId, QeError> {
        if vars.len() > MAX_WIDTH {
            return Err(QeError::TooManyVariables(vars.len()));
        }
        Ok(match f {
            Formula::Const(b) => Manager::constant(*b),
            Formula::Atom(a) => self.atom(a, vars)?,
            Formula::Not(g) => {
                let g = self.compile_traced(g, vars, trace)?;
                self.not(g)
            }
            Formula::And(a, b) => {
                let (a, b) = (self.compile_traced(a, vars, trace)?, self.compile_traced(b, vars, trace)?);
                self.and(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.compile_traced(a, vars, trace)?, self.compile_traced(b, vars, trace)?);
                self.or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.compile_traced(a, vars, trace)?, self.compile_traced(b, vars, trace)?);
                let na = self.not(a);
                self.or(na, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.compile_traced(a, vars, trace)?, self.compile_traced(b, vars, trace)?);
                let x = self.xor(a, b);
                self.not(x)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let exists = matches!(f, Formula::Exists(..));
                if vars.contains(v) {
                    return Err(QeError::Internal(format!("variable `{v}` is bound twice")));
                }
                let mut inner = vars.to_vec();
                inner.push(v.clone());
                let body = self.compile_traced(g, &inner, trace)?;
                let r = if exists {
                    self.project(body)
                } else {
                    let nb = self.not(body);
                    let p = self.project(nb);
                    self.not(p)
                };
                if let Some(t) = trace {
                    t.push((vars.to_vec(), v.clone(), exists, r));
                }
                r
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{cells_of, Card, Minterm, Term};
    use crate::syntax::parse;

    fn vars(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| Var::new(n)).collect()
    }

    /// Atom diagrams agree with direct evaluation on every class vector.
    #[test]
    fn atoms_match_their_definition() {
        let vs = vars(&["x", "y"]);
        let dom = Domain::new(4, 6);
        let mut m = Manager::new(dom);
        let srcs = [
            "x = 0",
            "C[3](x | y)",
            "Fin(x + y)",
            "Res[3,1](x)",
            "Res[2,0](x & ~y)",
            "C[1](1)",
            "Fin(0)",
        ];
        let cards: Vec<Card> = (0..12).map(Card::Finite).chain([Card::Infinite]).collect();
        for src in srcs {
            let Formula::Atom(a) = parse(src).unwrap() else { panic!() };
            let d = m.atom(&a, &vs).unwrap();
            for i in 0..cards.len().pow(4) {
                let cell_cards: Vec<Card> = (0..4)
                    .map(|j| cards[(i / cards.len().pow(j)) % cards.len()])
                    .collect();
                let total = cells_of(a.term(), &vs)
                    .iter()
                    .fold(Card::Finite(0), |acc, c: &Minterm| acc + cell_cards[c.index()]);
                let direct = crate::descriptor::atom_condition(&a).holds(&|_: &Term| total);
                let classes: Vec<usize> = cell_cards.iter().map(|&c| dom.class_of(c)).collect();
                assert_eq!(m.eval(d, &classes), direct, "{src} at {cell_cards:?}");
            }
        }
    }

    #[test]
    fn equal_functions_share_nodes() {
        let vs = vars(&["x"]);
        let mut m = Manager::new(Domain::new(2, 1));
        let a = m.compile(&parse("~(C[1](x) & Fin(x))").unwrap(), &vs).unwrap();
        let b = m.compile(&parse("x = 0 | ~Fin(x)").unwrap(), &vs).unwrap();
        assert_eq!(a, b);
    }
}
