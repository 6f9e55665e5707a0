use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::ast::{Atom, Formula, Term};
use crate::qe::Theory;

/// Which axioms to generate: the theory and the largest parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaInstanceSpec {
    pub theory: Theory,
    /// Largest modulus `n` or `m` in the residue schemas.
    pub max_modulus: u32,
    /// Largest residue parameter `r`, `s` and largest exact count.
    pub max_param: u32,
    /// Largest count index `k` in the count schemas.
    pub max_count: u32,
}

impl SchemaInstanceSpec {
    /// Every parameter bounded by `bound`.
    pub fn new(theory: Theory, bound: u32) -> SchemaInstanceSpec {
        SchemaInstanceSpec {
            theory,
            max_modulus: bound,
            max_param: bound,
            max_count: bound,
        }
    }
}

/// One instance of an axiom schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub family: &'static str,
    pub formula: Formula,
}

fn x() -> Term {
    Term::var("x")
}

fn y() -> Term {
    Term::var("y")
}

fn c(k: u32, t: &Term) -> Formula {
    Formula::atom(Atom::at_least(k, t.clone()).expect("k >= 1"))
}

fn fin(t: &Term) -> Formula {
    Formula::atom(Atom::Fin(t.clone()))
}

fn res(n: u32, r: i64, t: &Term) -> Formula {
    Formula::atom(Atom::res(n, r, t.clone()).expect("n >= 1"))
}

/// `♯(t) = m`.
fn card_is(m: u32, t: &Term) -> Formula {
    if m == 0 {
        Formula::eq(t, &Term::zero())
    } else {
        Formula::and(c(m, t), Formula::not(c(m + 1, t)))
    }
}

fn is_atom(t: &Term) -> Formula {
    card_is(1, t)
}

fn disjoint(s: &Term, t: &Term) -> Formula {
    Formula::eq(&(s * t), &Term::zero())
}

fn all_x(body: Formula) -> Formula {
    Formula::forall("x", body)
}

fn all_xy(body: Formula) -> Formula {
    Formula::forall("x", Formula::forall("y", body))
}

/// Axiom instances of the theory and of the theories below it, in a fixed
/// order and without repeats.
pub fn generate_axioms(spec: &SchemaInstanceSpec) -> Vec<Axiom> {
    let mut out = Vec::new();
    let mut push = |family: &'static str, formula: Formula| out.push(Axiom { family, formula });
    let (nmax, pmax, kmax) = (spec.max_modulus, spec.max_param, spec.max_count);

    // Infinite atomic Boolean algebras.
    for k in 1..=kmax {
        push("infinite", c(k, &Term::one()));
    }
    push(
        "atomic",
        all_x(Formula::implies(
            Formula::ne(&x(), &Term::zero()),
            Formula::exists("y", Formula::and(Formula::le(&y(), &x()), is_atom(&y()))),
        )),
    );
    push(
        "atom-definition",
        all_x(Formula::iff(
            is_atom(&x()),
            Formula::and(
                Formula::ne(&x(), &Term::zero()),
                Formula::forall(
                    "y",
                    Formula::implies(
                        Formula::le(&y(), &x()),
                        Formula::or(Formula::eq(&y(), &Term::zero()), Formula::eq(&y(), &x())),
                    ),
                ),
            ),
        )),
    );
    push("count-one", all_x(Formula::iff(c(1, &x()), Formula::ne(&x(), &Term::zero()))));
    for k in 1..kmax {
        push(
            "count-step",
            all_x(Formula::iff(
                c(k + 1, &x()),
                Formula::exists(
                    "y",
                    Formula::and_all([
                        Formula::le(&y(), &x()),
                        is_atom(&y()),
                        c(k, &x().minus(&y())),
                    ]),
                ),
            )),
        );
    }

    if spec.theory >= Theory::T2 {
        push("ideal-zero", fin(&Term::zero()));
        push("ideal-proper", Formula::not(fin(&Term::one())));
        push(
            "ideal-union",
            all_xy(Formula::implies(
                Formula::and(fin(&x()), fin(&y())),
                fin(&x().join(&y())),
            )),
        );
        push(
            "ideal-down",
            all_xy(Formula::implies(
                Formula::and(fin(&x()), Formula::le(&y(), &x())),
                fin(&y()),
            )),
        );
        for n in 0..=kmax {
            push("small-is-fin", all_x(Formula::implies(Formula::not(c(n + 1, &x())), fin(&x()))));
        }
        push(
            "main",
            all_x(Formula::implies(
                Formula::not(fin(&x())),
                Formula::exists(
                    "y",
                    Formula::and_all([
                        Formula::lt(&y(), &x()),
                        Formula::not(fin(&y())),
                        Formula::not(fin(&x().minus(&y()))),
                    ]),
                ),
            )),
        );
    }

    if spec.theory >= Theory::T3 {
        for n in 1..=nmax {
            for r in 0..n {
                push("res-fin", all_x(Formula::implies(res(n, r as i64, &x()), fin(&x()))));
            }
        }
        for n in 1..=nmax {
            push("res-zero", res(n, 0, &Term::zero()));
            for m in 0..=pmax {
                push(
                    "count-res",
                    all_x(Formula::implies(
                        Formula::and(fin(&x()), card_is(m, &x())),
                        res(n, m as i64, &x()),
                    )),
                );
            }
        }
        for n in 1..=nmax {
            for r in 0..=pmax {
                for s in 0..=pmax {
                    let (r, s) = (r as i64, s as i64);
                    let body = if (r - s) % n as i64 == 0 {
                        ("res-congruent", res(n, s, &x()))
                    } else {
                        ("res-distinct", Formula::not(res(n, s, &x())))
                    };
                    push(body.0, all_x(Formula::implies(res(n, r, &x()), body.1)));
                }
            }
        }
        for m in 1..=nmax {
            for n in (1..=m).filter(|n| m % n == 0) {
                for r in 0..=pmax {
                    push(
                        "res-divisor",
                        all_x(Formula::implies(res(m, r as i64, &x()), res(n, r as i64, &x()))),
                    );
                }
            }
        }
        for n in 1..=nmax {
            push(
                "res-cover",
                all_x(Formula::implies(
                    fin(&x()),
                    Formula::or_all((0..n).map(|r| res(n, r as i64, &x()))),
                )),
            );
        }
        for n in 1..=nmax {
            for r in 0..=pmax {
                for s in 0..=pmax {
                    push(
                        "res-additive",
                        all_xy(Formula::implies(
                            Formula::and_all([
                                disjoint(&x(), &y()),
                                res(n, r as i64, &x()),
                                res(n, s as i64, &y()),
                            ]),
                            res(n, (r + s) as i64, &x().join(&y())),
                        )),
                    );
                }
            }
        }
        for n in 1..=nmax {
            for r in 0..=pmax {
                let splits = (0..n).flat_map(|s| (0..n).map(move |t| (s, t)));
                let options = splits
                    .filter(|&(s, t)| (s + t) % n == r % n)
                    .map(|(s, t)| Formula::and(res(n, s as i64, &x()), res(n, t as i64, &y())));
                push(
                    "res-split",
                    all_xy(Formula::implies(
                        Formula::and(disjoint(&x(), &y()), res(n, r as i64, &x().join(&y()))),
                        Formula::or_all(options),
                    )),
                );
            }
        }
    }

    // Residues are stored reduced, so distinct parameters can give the same
    // sentence.
    let mut seen = HashSet::new();
    out.retain(|a| seen.insert(a.formula.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print;

    #[test]
    fn families_by_theory() {
        let t1 = generate_axioms(&SchemaInstanceSpec::new(Theory::T1, 3));
        assert!(t1.iter().all(|a| a.formula.level() == crate::ast::Level::L1));
        let t2 = generate_axioms(&SchemaInstanceSpec::new(Theory::T2, 2));
        let shown: Vec<String> = t2.iter().map(|a| print(&a.formula)).collect();
        assert!(shown.contains(&"A x (~C[3](x) -> Fin(x))".to_string()), "{shown:?}");
        assert!(t2.iter().any(|a| a.family == "main"));
        let t3 = generate_axioms(&SchemaInstanceSpec::new(Theory::T3, 4));
        let shown: Vec<String> = t3.iter().map(|a| print(&a.formula)).collect();
        assert!(shown.contains(&"Res[3,0](0)".to_string()));
        let families: HashSet<&str> = t3.iter().map(|a| a.family).collect();
        for f in [
            "res-fin",
            "count-res",
            "res-congruent",
            "res-distinct",
            "res-divisor",
            "res-cover",
            "res-additive",
            "res-split",
        ] {
            assert!(families.contains(f), "{f}");
        }
    }

    #[test]
    fn deterministic() {
        let s = SchemaInstanceSpec::new(Theory::T3, 3);
        assert_eq!(generate_axioms(&s), generate_axioms(&s));
    }
}
