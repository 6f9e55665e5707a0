//! Axiom instances, random formulas, and definability experiments.

mod axioms;
mod enumerate;
mod random;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Formula, Level};
use crate::qe::{decide, QeError, Theory};
use crate::syntax::print;

pub use axioms::{generate_axioms, Axiom, SchemaInstanceSpec};
pub use enumerate::{defcheck, defcheck_candidates, enumerate_formulas, Definability, EnumerationSpec};
pub use random::{random_formula, random_sentence, FormulaSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error("{0}")]
    Variables(String),
}

/// The verdict on one axiom instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub family: String,
    pub formula: String,
    /// `None` when the engine rejected the sentence.
    pub value: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub theory: Theory,
    pub spec: SchemaInstanceSpec,
    pub total: usize,
    pub true_count: usize,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_true(&self) -> bool {
        self.true_count == self.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomResult> {
        self.results.iter().filter(|r| r.value != Some(true))
    }

    /// One line per failure, then a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.failures() {
            let what = match (&r.value, &r.error) {
                (_, Some(e)) => format!("error: {e}"),
                _ => "False".to_string(),
            };
            let _ = writeln!(out, "FAIL [{}] {}: {what}", r.family, r.formula);
        }
        if self.all_true() {
            let _ = writeln!(out, "{} instances, all True", self.total);
        } else {
            let _ = writeln!(out, "{} instances, {} not True", self.total, self.total - self.true_count);
        }
        out
    }
}

/// Generates the axiom instances and decides each in `spec.theory`.
/// Work is split over `threads` workers; results keep generation order.
pub fn check_axioms(spec: &SchemaInstanceSpec, threads: usize) -> AxiomReport {
    let axioms = generate_axioms(spec);
    let chunk = axioms.len().div_ceil(threads.max(1)).max(1);
    let results: Vec<AxiomResult> = std::thread::scope(|s| {
        let handles: Vec<_> = axioms
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|a| {
                            let v = decide(&a.formula, spec.theory);
                            AxiomResult {
                                family: a.family.to_string(),
                                formula: print(&a.formula),
                                value: v.as_ref().ok().map(|v| v.value),
                                error: v.err().map(|e| e.to_string()),
                            }
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    AxiomReport {
        theory: spec.theory,
        spec: *spec,
        total: results.len(),
        true_count: results.iter().filter(|r| r.value == Some(true)).count(),
        results,
    }
}

/// A definability search, ready to print.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefcheckReport {
    pub target: String,
    pub level: Level,
    pub size: usize,
    /// `NotDefinable` or `DefinableBy`.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub checked: usize,
}

impl DefcheckReport {
    pub fn new(target: &Formula, spec: &EnumerationSpec, result: &Definability) -> DefcheckReport {
        let (outcome, formula) = match result {
            Definability::NotDefinable { .. } => ("NotDefinable", None),
            Definability::DefinableBy { formula, .. } => ("DefinableBy", Some(print(formula))),
        };
        DefcheckReport {
            target: print(target),
            level: spec.level,
            size: spec.size,
            outcome: outcome.to_string(),
            formula,
            checked: result.checked(),
        }
    }

    pub fn to_text(&self) -> String {
        match &self.formula {
            Some(f) => format!("DefinableBy {f} (candidate {})\n", self.checked),
            None => format!("NotDefinable ({} candidates checked)\n", self.checked),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_axiom_runs_are_all_true() {
        for theory in [Theory::T1, Theory::T2, Theory::T3] {
            let r = check_axioms(&SchemaInstanceSpec::new(theory, 3), 2);
            assert!(r.all_true(), "{}", r.to_text());
        }
    }
}
