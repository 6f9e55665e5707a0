//! Reading a diagram back as a quantifier-free formula.

use std::collections::HashMap;

use crate::ast::{Atom, Formula, Minterm, Term, Var};

use super::diagram::{Manager, NodeId, FALSE, TRUE};
use super::domain::{Domain, Label};

pub(crate) fn and2(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Const(false), _) | (_, Formula::Const(false)) => Formula::Const(false),
        (Formula::Const(true), x) | (x, Formula::Const(true)) => x,
        (a, b) => Formula::and(a, b),
    }
}

pub(crate) fn or2(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Const(true), _) | (_, Formula::Const(true)) => Formula::Const(true),
        (Formula::Const(false), x) | (x, Formula::Const(false)) => x,
        (a, b) => Formula::or(a, b),
    }
}

pub(crate) fn not1(a: Formula) -> Formula {
    match a {
        Formula::Const(b) => Formula::Const(!b),
        Formula::Not(g) => *g,
        g => Formula::not(g),
    }
}

fn or_many(parts: impl IntoIterator<Item = Formula>) -> Formula {
    parts.into_iter().fold(Formula::Const(false), or2)
}

fn count(k: u64, t: &Term) -> Formula {
    if k == 0 {
        return Formula::Const(true);
    }
    Formula::atom(Atom::at_least(k as u32, t.clone()).expect("positive index"))
}

/// `t` has a number of atoms in `[a, b]`.
fn run(a: u64, b: u64, t: &Term) -> Formula {
    if b == 0 {
        return Formula::atom(Atom::IsZero(t.clone()));
    }
    and2(count(a, t), not1(count(b + 1, t)))
}

/// The cardinality of `t` lies in one of the classes of `label`.
fn positive(dom: Domain, label: &Label, t: &Term) -> Formula {
    let (k, l) = (dom.k as u64, dom.l as u64);
    let inf = label.contains(dom.inf());
    // Which counts `c >= k` are in the label, as a set of residues mod `l`.
    let large: Vec<bool> = if dom.fin {
        (0..l).map(|r| label.contains((k + r) as usize)).collect()
    } else {
        vec![inf]
    };
    let d = (1..=l)
        .filter(|d| l % d == 0)
        .find(|&d| (0..l).all(|r| large[r as usize] == large[(r % d) as usize]))
        .expect("l itself is a period");
    let periodic = |c: u64| large[(c % d) as usize];
    // Least threshold from which membership follows the periodic pattern.
    let t0 = (0..=k)
        .find(|&t0| (t0..k).all(|c| label.contains(c as usize) == periodic(c)))
        .expect("k qualifies");

    let mut parts = Vec::new();
    let mut c = 0;
    while c < t0 {
        if label.contains(c as usize) {
            let start = c;
            while c + 1 < t0 && label.contains(c as usize + 1) {
                c += 1;
            }
            parts.push(run(start, c, t));
        }
        c += 1;
    }
    let residues: Vec<u64> = (0..d).filter(|&r| large[r as usize]).collect();
    if !dom.fin {
        if inf {
            parts.push(count(t0, t));
        }
    } else if residues.len() as u64 == d {
        let tail = count(t0, t);
        parts.push(if inf {
            tail
        } else {
            and2(Formula::atom(Atom::Fin(t.clone())), tail)
        });
    } else {
        if !residues.is_empty() {
            let res = or_many(residues.iter().map(|&r| {
                Formula::atom(Atom::res(d as u32, r as i64, t.clone()).expect("positive modulus"))
            }));
            let least = (0..).find(|&c| periodic(c)).expect("some residue");
            parts.push(if t0 > least {
                and2(res, count(t0, t))
            } else {
                res
            });
        }
        if inf {
            parts.push(not1(Formula::atom(Atom::Fin(t.clone()))));
        }
    }
    or_many(parts)
}

/// The shorter of the direct and the complemented description.
pub(crate) fn cell_formula(dom: Domain, label: &Label, t: &Term) -> Formula {
    let full = Label::full(dom.size());
    if label.is_empty() {
        return Formula::Const(false);
    }
    if *label == full {
        return Formula::Const(true);
    }
    let direct = positive(dom, label, t);
    let negated = not1(positive(dom, &full.minus(label), t));
    if negated.size() < direct.size() {
        negated
    } else {
        direct
    }
}

/// A formula over `vars` true exactly where the diagram is.
pub(crate) fn synthesize(m: &Manager, root: NodeId, vars: &[Var]) -> Formula {
    let width = vars.len();
    let mut memo: HashMap<NodeId, Formula> = HashMap::new();
    fn go(
        m: &Manager,
        a: NodeId,
        vars: &[Var],
        width: usize,
        memo: &mut HashMap<NodeId, Formula>,
    ) -> Formula {
        match a {
            TRUE => return Formula::Const(true),
            FALSE => return Formula::Const(false),
            _ => {}
        }
        if let Some(f) = memo.get(&a) {
            return f.clone();
        }
        let t = Minterm::new(m.level(a) as usize, width).term(vars);
        let dom = m.domain();
        let edges = m.edges(a).to_vec();
        // The edge to FALSE needs no disjunct, and if the remaining edges
        // all lead to TRUE a single cell condition suffices.
        let f = if edges.iter().all(|&(_, c)| c == TRUE || c == FALSE) {
            let mut live = Label::empty(dom.size());
            for (l, c) in &edges {
                if *c == TRUE {
                    live.union_with(l);
                }
            }
            cell_formula(dom, &live, &t)
        } else {
            or_many(
                edges
                    .iter()
                    .filter(|&&(_, c)| c != FALSE)
                    .map(|(l, c)| and2(cell_formula(dom, l, &t), go(m, *c, vars, width, memo)))
                    .collect::<Vec<_>>(),
            )
        };
        memo.insert(a, f.clone());
        f
    }
    go(m, root, vars, width, &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Card;
    use crate::descriptor::atom_condition;

    /// Every label of a small domain renders to a formula true exactly on
    /// its classes.
    #[test]
    fn cell_formulas_are_exact() {
        let t = Term::var("x");
        for dom in [Domain::new(3, 2), Domain::new(2, 3), Domain::counts_only(3)] {
            let n = dom.size();
            let cards: Vec<Card> = (0..16).map(Card::Finite).chain([Card::Infinite]).collect();
            for bits in 0u32..1 << n {
                let mut label = Label::empty(n);
                for i in (0..n).filter(|i| bits >> i & 1 == 1) {
                    label.insert(i);
                }
                let f = cell_formula(dom, &label, &t);
                for &c in &cards {
                    let want = label.contains(dom.class_of(c));
                    assert_eq!(eval_at(&f, c), want, "{f} at {c:?} in {dom:?}");
                }
                if !dom.fin {
                    assert!(f.level() == crate::ast::Level::L1);
                }
            }
        }
    }

    fn eval_at(f: &Formula, c: Card) -> bool {
        match f {
            Formula::Const(b) => *b,
            Formula::Atom(a) => atom_condition(a).holds(&|_: &Term| c),
            Formula::Not(g) => !eval_at(g, c),
            Formula::And(a, b) => eval_at(a, c) && eval_at(b, c),
            Formula::Or(a, b) => eval_at(a, c) || eval_at(b, c),
            _ => unreachable!(),
        }
    }
}
