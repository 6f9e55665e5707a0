use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use super::{first_at_least, Count, Descriptor, FinStatus, Residue};
use crate::ast::{Card, Formula, Term};

/// Requirements on `β` and on `m − β` for a sought `β ≤ m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub part: Descriptor,
    pub rest: Descriptor,
}

impl SplitSpec {
    pub fn new(part: Descriptor, rest: Descriptor) -> SplitSpec {
        SplitSpec { part, rest }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("split component `{0}` is unsatisfiable")]
    Unsatisfiable(Descriptor),
}

/// A disjunction of descriptors on the ambient element `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub options: Vec<Descriptor>,
}

impl Projection {
    pub fn admits(&self, c: Card) -> bool {
        self.options.iter().any(|d| d.admits(c))
    }

    pub fn is_trivial(&self) -> bool {
        self.options.iter().any(Descriptor::is_trivial)
    }

    pub fn to_formula(&self, m: &Term) -> Formula {
        Formula::or_all(self.options.iter().map(|d| d.to_formula(m)))
    }
}

/// The finite cardinalities a normalized descriptor admits.
enum Finite {
    None,
    Single(u64),
    /// `{c ≥ from : c mod N ∈ S}`.
    From(u64, Residue),
}

fn parts(d: &Descriptor) -> (Finite, bool) {
    match (d.count, d.fin) {
        (_, FinStatus::MustNotFin) => (Finite::None, true),
        (Count::Exact(e), _) => (Finite::Single(e), false),
        (Count::AtLeast(k), fin) => {
            let r = d.residue.clone().unwrap_or_else(|| Residue::new(1, [0]));
            (Finite::From(k, r), fin == FinStatus::Unconstrained)
        }
    }
}

/// Decides, as a condition on `m`, whether some `β ≤ m` realizes `part` on
/// `β` and `rest` on `m − β`.
///
/// The answer is the sumset of the two denotations: an infinite `m` splits
/// whenever one side admits infinity (an infinite set has subsets of every
/// size and co-size, and two disjoint infinite parts), and a finite `m`
/// splits iff its count is a sum of admissible finite counts.
pub fn project_split(spec: &SplitSpec) -> Result<Projection, SplitError> {
    let a = spec
        .part
        .normalize()
        .ok_or_else(|| SplitError::Unsatisfiable(spec.part.clone()))?;
    let b = spec
        .rest
        .normalize()
        .ok_or_else(|| SplitError::Unsatisfiable(spec.rest.clone()))?;
    let (fa, ia) = parts(&a);
    let (fb, ib) = parts(&b);
    // Both sides are nonempty here, so one infinite side suffices.
    let infinite = ia || ib;

    let mut options: Vec<Descriptor> = match (&fa, &fb) {
        (Finite::None, _) | (_, Finite::None) => vec![],
        (Finite::Single(x), Finite::Single(y)) => vec![Descriptor::exact(x + y)],
        (Finite::Single(e), Finite::From(k, r)) | (Finite::From(k, r), Finite::Single(e)) => {
            let shifted = Residue::new(r.modulus, r.allowed.iter().map(|s| s + e));
            vec![Descriptor::residues(shifted.modulus, shifted.allowed)
                .with_count(Count::AtLeast(k + e))]
        }
        (Finite::From(k1, r1), Finite::From(k2, r2)) => {
            let n = r1.modulus.lcm(&r2.modulus);
            let (l1, l2) = (r1.lift(n), r2.lift(n));
            // Least attainable sum in each residue class.
            let mut least: BTreeMap<u64, u64> = BTreeMap::new();
            for &s1 in &l1.allowed {
                for &s2 in &l2.allowed {
                    let sum = first_at_least(*k1, s1, n) + first_at_least(*k2, s2, n);
                    let e = least.entry((s1 + s2) % n).or_insert(sum);
                    *e = (*e).min(sum);
                }
            }
            let mut by_threshold: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
            for (rho, t) in least {
                by_threshold.entry(t).or_default().push(rho);
            }
            by_threshold
                .into_iter()
                .map(|(t, rhos)| Descriptor::residues(n, rhos).with_count(Count::AtLeast(t)))
                .collect()
        }
    };
    let mut options: Vec<Descriptor> = options
        .drain(..)
        .map(|d| d.normalize().expect("sumset components are nonempty"))
        .collect();

    if infinite {
        // `{c ≥ k}` together with infinity is a single unconstrained bound.
        let merge = options
            .iter()
            .position(|d| d.residue.is_none() && matches!(d.count, Count::AtLeast(_)));
        match merge {
            Some(i) => options[i].fin = FinStatus::Unconstrained,
            None => options.push(Descriptor::must_not_fin()),
        }
    }
    options.sort();
    Ok(Projection { options })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print;

    fn m() -> Term {
        Term::var("m")
    }

    #[test]
    fn nonempty_parts_need_two_atoms() {
        let spec = SplitSpec::new(Descriptor::at_least(1), Descriptor::at_least(1));
        let p = project_split(&spec).unwrap();
        assert_eq!(print(&p.to_formula(&m())), "C[2](m)");
    }

    #[test]
    fn two_infinite_parts() {
        let spec = SplitSpec::new(Descriptor::must_not_fin(), Descriptor::must_not_fin());
        let p = project_split(&spec).unwrap();
        assert_eq!(print(&p.to_formula(&m())), "~Fin(m)");
    }

    #[test]
    fn residues_add() {
        let d = Descriptor::residues(3, [1]).with_count(Count::AtLeast(1));
        let p = project_split(&SplitSpec::new(d.clone(), d)).unwrap();
        // `C[2](m)` is implied: the least count congruent to 2 is 2.
        assert_eq!(print(&p.to_formula(&m())), "Fin(m) & Res[3,2](m)");
        let expected = Descriptor::residues(3, [2]).with_count(Count::AtLeast(2));
        assert_eq!(p.options, vec![expected.normalize().unwrap()]);
    }

    #[test]
    fn unsatisfiable_components_are_rejected() {
        let bad = Descriptor::exact(2).with_fin(FinStatus::MustNotFin);
        assert!(project_split(&SplitSpec::new(bad, Descriptor::trivial())).is_err());
    }

    /// Brute force over finite sets: `m` with `c` atoms splits iff some
    /// `j ≤ c` is admitted on one side with `c − j` on the other.
    fn finite_oracle(spec: &SplitSpec, c: u64) -> bool {
        (0..=c).any(|j| spec.part.admits(Card::Finite(j)) && spec.rest.admits(Card::Finite(c - j)))
    }

    /// For infinite `m`, a part can be finite of any size, cofinite of any
    /// co-size, or infinite and coinfinite.
    fn infinite_oracle(spec: &SplitSpec) -> bool {
        let mut shapes: Vec<(Card, Card)> = vec![(Card::Infinite, Card::Infinite)];
        for j in 0..40 {
            shapes.push((Card::Finite(j), Card::Infinite));
            shapes.push((Card::Infinite, Card::Finite(j)));
        }
        shapes
            .into_iter()
            .any(|(p, r)| spec.part.admits(p) && spec.rest.admits(r))
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut ds = vec![Descriptor::trivial(), Descriptor::must_not_fin()];
        for k in 0..5 {
            ds.push(Descriptor::exact(k));
            ds.push(Descriptor::at_least(k));
            ds.push(Descriptor::at_least(k).with_fin(FinStatus::MustFin));
            for n in 2..5 {
                for s in 0..n {
                    ds.push(Descriptor::residues(n, [s]).with_count(Count::AtLeast(k)));
                    ds.push(Descriptor::residues(n, [s, (s + 1) % n]).with_count(Count::AtLeast(k)));
                }
            }
        }
        for a in &ds {
            for b in &ds {
                let spec = SplitSpec::new(a.clone(), b.clone());
                let p = project_split(&spec).unwrap();
                for c in 0..30 {
                    assert_eq!(
                        p.admits(Card::Finite(c)),
                        finite_oracle(&spec, c),
                        "{a} / {b} at {c}"
                    );
                }
                assert_eq!(p.admits(Card::Infinite), infinite_oracle(&spec), "{a} / {b} at inf");
            }
        }
    }
}
