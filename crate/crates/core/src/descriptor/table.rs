use std::collections::BTreeMap;

use crate::ast::{cells_of, Card, Formula, Minterm, Var};

use super::{Condition, Count, Descriptor, FinStatus, Literal, Residue};

/// Descriptors on the minterms of an ordered variable list. Minterms that
/// are absent carry the trivial descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MintermTable {
    vars: Vec<Var>,
    cells: BTreeMap<usize, Descriptor>,
}

impl MintermTable {
    pub fn new(vars: Vec<Var>) -> MintermTable {
        MintermTable {
            vars,
            cells: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    pub fn get(&self, m: Minterm) -> Descriptor {
        self.cells.get(&m.index()).cloned().unwrap_or_default()
    }

    /// Tightens one cell; `false` when the cell becomes unsatisfiable, in
    /// which case the table is left unchanged.
    pub fn constrain(&mut self, m: Minterm, d: &Descriptor) -> bool {
        match self.get(m).conjoin(d) {
            Some(n) => {
                if n.is_trivial() {
                    self.cells.remove(&m.index());
                } else {
                    self.cells.insert(m.index(), n);
                }
                true
            }
            None => false,
        }
    }

    pub fn conjoin(&self, other: &MintermTable) -> Option<MintermTable> {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (&i, d) in &other.cells {
            if !out.constrain(Minterm::new(i, self.width()), d) {
                return None;
            }
        }
        Some(out)
    }

    /// The nontrivial cells in index order.
    pub fn entries(&self) -> impl Iterator<Item = (Minterm, &Descriptor)> {
        let w = self.width();
        self.cells.iter().map(move |(&i, d)| (Minterm::new(i, w), d))
    }

    pub fn holds(&self, card: &dyn Fn(Minterm) -> Card) -> bool {
        self.entries().all(|(m, d)| d.admits(card(m)))
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and_all(self.entries().map(|(m, d)| d.to_formula(&m.term(&self.vars))))
    }

    /// Rewrites a literal over the cells of its term as a disjunction of
    /// tables. The cell counts add up to the count of the term; the term is
    /// finite iff every cell is; residues of the cells add up modulo `N`.
    pub fn expand(lit: &Literal, vars: &[Var]) -> Vec<MintermTable> {
        let Some(d) = lit.descriptor.normalize() else {
            return vec![];
        };
        let cells = cells_of(&lit.term, vars);
        let base = MintermTable::new(vars.to_vec());
        if cells.is_empty() {
            return if d.admits(Card::Finite(0)) { vec![base] } else { vec![] };
        }
        let mut acc = vec![base];
        match d.count {
            Count::Exact(e) => {
                acc = product(&acc, &compositions(&cells, e, vars, Descriptor::exact));
            }
            Count::AtLeast(0) => {}
            Count::AtLeast(k) => {
                acc = product(&acc, &compositions(&cells, k, vars, Descriptor::at_least));
            }
        }
        match d.fin {
            FinStatus::MustFin => {
                let mut t = MintermTable::new(vars.to_vec());
                for &m in &cells {
                    t.constrain(m, &Descriptor::must_fin());
                }
                acc = product(&acc, &[t]);
            }
            FinStatus::MustNotFin => {
                let options: Vec<MintermTable> = cells
                    .iter()
                    .map(|&m| {
                        let mut t = MintermTable::new(vars.to_vec());
                        t.constrain(m, &Descriptor::must_not_fin());
                        t
                    })
                    .collect();
                acc = product(&acc, &options);
            }
            FinStatus::Unconstrained => {}
        }
        if let Some(r) = &d.residue {
            acc = product(&acc, &residue_distributions(&cells, r, vars));
        }
        acc
    }

    /// A condition as a disjunction of tables over `vars`.
    pub fn expand_condition(c: &Condition, vars: &[Var]) -> Vec<MintermTable> {
        let mut out = Vec::new();
        for conj in &c.disjuncts {
            let mut acc = vec![MintermTable::new(vars.to_vec())];
            for lit in conj {
                acc = product(&acc, &MintermTable::expand(lit, vars));
                if acc.is_empty() {
                    break;
                }
            }
            out.extend(acc);
        }
        out
    }
}

/// Pairwise conjunction of two disjunctions, dropping conflicts.
pub(crate) fn product(a: &[MintermTable], b: &[MintermTable]) -> Vec<MintermTable> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            if let Some(z) = x.conjoin(y) {
                if !out.contains(&z) {
                    out.push(z);
                }
            }
        }
    }
    out
}

/// One table per way of writing `total` as an ordered sum over the cells,
/// each part becoming `mk(part)` on its cell.
fn compositions(
    cells: &[Minterm],
    total: u64,
    vars: &[Var],
    mk: fn(u64) -> Descriptor,
) -> Vec<MintermTable> {
    let mut out = Vec::new();
    let mut parts = vec![0u64; cells.len()];
    fn go(
        i: usize,
        left: u64,
        parts: &mut Vec<u64>,
        cells: &[Minterm],
        vars: &[Var],
        mk: fn(u64) -> Descriptor,
        out: &mut Vec<MintermTable>,
    ) {
        if i + 1 == cells.len() {
            parts[i] = left;
            let mut t = MintermTable::new(vars.to_vec());
            for (&m, &p) in cells.iter().zip(parts.iter()) {
                t.constrain(m, &mk(p));
            }
            out.push(t);
            return;
        }
        for p in 0..=left {
            parts[i] = p;
            go(i + 1, left - p, parts, cells, vars, mk, out);
        }
    }
    go(0, total, &mut parts, cells, vars, mk, &mut out);
    out
}

/// One table per assignment of residues to the cells whose sum lies in `r`.
fn residue_distributions(cells: &[Minterm], r: &Residue, vars: &[Var]) -> Vec<MintermTable> {
    let n = r.modulus();
    let mut out = Vec::new();
    let mut rs = vec![0u64; cells.len()];
    loop {
        let sum: u64 = rs.iter().sum::<u64>() % n;
        if r.contains(sum) {
            let mut t = MintermTable::new(vars.to_vec());
            for (&m, &s) in cells.iter().zip(rs.iter()) {
                t.constrain(m, &Descriptor::residues(n, [s]));
            }
            out.push(t);
        }
        let mut i = 0;
        loop {
            if i == rs.len() {
                return out;
            }
            rs[i] += 1;
            if rs[i] < n {
                break;
            }
            rs[i] = 0;
            i += 1;
        }
    }
}

impl From<&MintermTable> for Condition {
    fn from(t: &MintermTable) -> Condition {
        Condition {
            disjuncts: vec![t
                .entries()
                .map(|(m, d)| Literal::new(m.term(t.vars()), d.clone()))
                .collect()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Atom, Term};
    use crate::descriptor::atom_condition;

    fn vars(names: &[&str]) -> Vec<Var> {
        names.iter().map(|n| Var::new(n)).collect()
    }

    fn all_card_vectors(width: usize, limit: u64) -> Vec<Vec<Card>> {
        let values: Vec<Card> = (0..limit).map(Card::Finite).chain([Card::Infinite]).collect();
        let mut out = vec![vec![]];
        for _ in 0..1usize << width {
            out = out
                .into_iter()
                .flat_map(|v: Vec<Card>| {
                    values.iter().map(move |&c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn expansion_matches_the_atom() {
        let vs = vars(&["x", "y"]);
        let x = Term::var("x");
        let y = Term::var("y");
        let terms = [x.join(&y), &x + &y, x.clone(), Term::one(), Term::zero()];
        let mut atoms = Vec::new();
        for t in &terms {
            atoms.push(Atom::IsZero(t.clone()));
            atoms.push(Atom::at_least(3, t.clone()).unwrap());
            atoms.push(Atom::Fin(t.clone()));
            atoms.push(Atom::res(3, 1, t.clone()).unwrap());
        }
        let vectors = all_card_vectors(2, 5);
        for a in &atoms {
            let tables = MintermTable::expand_condition(&atom_condition(a), &vs);
            let negated = MintermTable::expand_condition(&crate::descriptor::negate_atom(a), &vs);
            for v in &vectors {
                let card = |m: Minterm| v[m.index()];
                let term_card = |t: &Term| {
                    cells_of(t, &vs)
                        .into_iter()
                        .fold(Card::Finite(0), |acc, m| acc + card(m))
                };
                let direct = atom_condition(a).holds(&term_card);
                assert_eq!(tables.iter().any(|t| t.holds(&card)), direct, "{a:?} at {v:?}");
                assert_eq!(negated.iter().any(|t| t.holds(&card)), !direct, "~{a:?} at {v:?}");
            }
        }
    }
}
