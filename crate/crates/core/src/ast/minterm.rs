use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{Atom, Formula};
use super::term::{Term, Var};

/// Number of atoms below an element: a natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Card {
    Finite(u64),
    Infinite,
}

impl Card {
    pub fn is_finite(self) -> bool {
        matches!(self, Card::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Card::Finite(n) => Some(n),
            Card::Infinite => None,
        }
    }
}

impl std::ops::Add for Card {
    type Output = Card;

    fn add(self, rhs: Card) -> Card {
        match (self, rhs) {
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a + b),
            _ => Card::Infinite,
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Infinite => f.write_str("inf"),
        }
    }
}

/// One of the `2^k` products `Π (v_i or 1 + v_i)` over an ordered variable list.
///
/// Cells are numbered with the first variable as the most significant bit, so
/// the two refinements of a cell by the last variable are adjacent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Minterm {
    index: usize,
    width: usize,
}

impl Minterm {
    pub fn new(index: usize, width: usize) -> Self {
        assert!(width < usize::BITS as usize && index < (1 << width));
        Minterm { index, width }
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn width(self) -> usize {
        self.width
    }

    /// Whether the product takes `v_i` itself (as opposed to its complement).
    pub fn selects(self, i: usize) -> bool {
        (self.index >> (self.width - 1 - i)) & 1 == 1
    }

    pub fn term(self, vars: &[Var]) -> Term {
        debug_assert_eq!(vars.len(), self.width);
        let mut t = Term::one();
        for (i, v) in vars.iter().enumerate() {
            let lit = Term::var(v.clone());
            let lit = if self.selects(i) { lit } else { lit.complement() };
            t = &t * &lit;
        }
        t
    }
}

/// Cells of a term: the minterms over `vars` lying below it.
pub fn cells_of(t: &Term, vars: &[Var]) -> Vec<Minterm> {
    let width = vars.len();
    (0..1usize << width)
        .map(|i| Minterm::new(i, width))
        .filter(|m| {
            t.eval_bool(&|v: &Var| {
                let pos = vars.iter().position(|w| w == v).expect("variable in cell space");
                m.selects(pos)
            })
        })
        .collect()
}

/// The constraint an atom places on the cardinalities of its cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellConstraint {
    /// Every cell is empty.
    AllZero,
    /// The cell counts sum to at least `k`.
    SumAtLeast(u32),
    /// Every cell is `Fin`.
    AllFin,
    /// Every cell is `Fin` and the counts sum to `residue` modulo `modulus`.
    FinResidue { modulus: u32, residue: u32 },
}

/// An atom rewritten over the minterms of a variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub cells: Vec<Minterm>,
    pub constraint: CellConstraint,
}

impl Decomposition {
    /// Evaluates the constraint given each cell's cardinality.
    pub fn holds(&self, card: &dyn Fn(Minterm) -> Card) -> bool {
        let cards = self.cells.iter().map(|&m| card(m));
        match self.constraint {
            CellConstraint::AllZero => cards.into_iter().all(|c| c == Card::Finite(0)),
            CellConstraint::SumAtLeast(k) => {
                let total = cards.fold(Card::Finite(0), |a, b| a + b);
                total >= Card::Finite(k as u64)
            }
            CellConstraint::AllFin => cards.into_iter().all(Card::is_finite),
            CellConstraint::FinResidue { modulus, residue } => {
                let mut sum = 0u64;
                for c in cards {
                    match c {
                        Card::Finite(n) => sum = (sum + n) % modulus as u64,
                        Card::Infinite => return false,
                    }
                }
                sum == residue as u64
            }
        }
    }

    /// True when no assignment of cardinalities can satisfy the constraint,
    /// e.g. `C_k(0)`.
    pub fn is_unsatisfiable(&self) -> bool {
        self.cells.is_empty()
            && match self.constraint {
                CellConstraint::SumAtLeast(k) => k > 0,
                CellConstraint::FinResidue { residue, .. } => residue != 0,
                CellConstraint::AllZero | CellConstraint::AllFin => false,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("decompose expects an atomic formula")]
    NotAtomic,
    #[error("variable `{0}` is not in the cell space")]
    UnknownVariable(Var),
}

/// Rewrites an atom as a constraint on the minterms of `vars` below its term.
pub fn decompose(atom: &Formula, vars: &[Var]) -> Result<Decomposition, DecomposeError> {
    let Formula::Atom(atom) = atom else {
        return Err(DecomposeError::NotAtomic);
    };
    decompose_atom(atom, vars)
}

pub fn decompose_atom(atom: &Atom, vars: &[Var]) -> Result<Decomposition, DecomposeError> {
    if let Some(v) = atom.term().vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(DecomposeError::UnknownVariable(v));
    }
    let cells = cells_of(atom.term(), vars);
    let constraint = match atom {
        Atom::IsZero(_) => CellConstraint::AllZero,
        Atom::AtLeast(k, _) => CellConstraint::SumAtLeast(*k),
        Atom::Fin(_) => CellConstraint::AllFin,
        Atom::Res {
            modulus, residue, ..
        } => CellConstraint::FinResidue {
            modulus: *modulus,
            residue: *residue,
        },
    };
    Ok(Decomposition { cells, constraint })
}
