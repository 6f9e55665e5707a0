use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::Card;

/// An eventually periodic subset of ℕ:
/// `transient ∪ { n ≥ T : n mod p ∈ R }` with `transient ⊆ [0, T)`.
///
/// Values are always canonical: `p` is the least eventual period and `T`
/// the least threshold for that period, so equal sets compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EPSet {
    transient: BTreeSet<u64>,
    threshold: u64,
    period: u64,
    residues: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpError {
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("transient element {0} is not below the threshold {1}")]
    TransientOutOfRange(u64, u64),
    #[error("residue {0} is not below the period {1}")]
    ResidueOutOfRange(u64, u64),
    #[error("malformed EPSet `{text}`: {reason}")]
    Syntax { text: String, reason: String },
}

impl EPSet {
    pub fn new(
        transient: impl IntoIterator<Item = u64>,
        threshold: u64,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<EPSet, EpError> {
        if period == 0 {
            return Err(EpError::ZeroPeriod);
        }
        let transient: BTreeSet<u64> = transient.into_iter().collect();
        if let Some(&n) = transient.iter().find(|&&n| n >= threshold) {
            return Err(EpError::TransientOutOfRange(n, threshold));
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(&r) = residues.iter().find(|&&r| r >= period) {
            return Err(EpError::ResidueOutOfRange(r, period));
        }
        Ok(EPSet {
            transient,
            threshold,
            period,
            residues,
        }
        .canonical())
    }

    pub fn empty() -> EPSet {
        EPSet {
            transient: BTreeSet::new(),
            threshold: 0,
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    pub fn full() -> EPSet {
        EPSet {
            residues: BTreeSet::from([0]),
            ..EPSet::empty()
        }
    }

    pub fn finite(elements: impl IntoIterator<Item = u64>) -> EPSet {
        let transient: BTreeSet<u64> = elements.into_iter().collect();
        let threshold = transient.last().map_or(0, |&m| m + 1);
        EPSet {
            transient,
            threshold,
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    /// `{ n : n mod p ∈ residues }`.
    pub fn periodic(period: u64, residues: impl IntoIterator<Item = u64>) -> EPSet {
        EPSet::new([], 0, period, residues.into_iter().map(|r| r % period.max(1)))
            .expect("valid periodic set")
    }

    pub fn transient(&self) -> &BTreeSet<u64> {
        &self.transient
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.transient.contains(&n)
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    /// Finite or with finite complement.
    pub fn is_finite_or_cofinite(&self) -> bool {
        self.residues.is_empty() || self.residues.len() as u64 == self.period
    }

    pub fn card(&self) -> Card {
        if self.is_finite() {
            Card::Finite(self.transient.len() as u64)
        } else {
            Card::Infinite
        }
    }

    /// The count modulo `n`; `None` (undefined) for infinite sets.
    pub fn residue(&self, n: u64) -> Option<u64> {
        self.card().finite().map(|c| c % n)
    }

    fn canonical(self) -> EPSet {
        let t = self.threshold;
        let p = self.period;
        let period = (1..=p)
            .filter(|d| p % d == 0)
            .find(|&d| (t..t + p).all(|n| self.contains(n) == self.contains(n + d)))
            .expect("p is a period");
        let mut threshold = t;
        while threshold > 0 && self.contains(threshold - 1) == self.contains(threshold - 1 + period)
        {
            threshold -= 1;
        }
        let transient = (0..threshold).filter(|&n| self.contains(n)).collect();
        let residues = (threshold..threshold + period)
            .filter(|&n| self.contains(n))
            .map(|n| n % period)
            .collect();
        EPSet {
            transient,
            threshold,
            period,
            residues,
        }
    }

    /// Pointwise combination. Beyond `max(T₁, T₂)` both operands repeat with
    /// period `lcm(p₁, p₂)`, so one period past the larger threshold fixes
    /// the result.
    pub fn combine(&self, other: &EPSet, op: impl Fn(bool, bool) -> bool) -> EPSet {
        let threshold = self.threshold.max(other.threshold);
        let period = self.period.lcm(&other.period);
        let at = |n: u64| op(self.contains(n), other.contains(n));
        EPSet {
            transient: (0..threshold).filter(|&n| at(n)).collect(),
            threshold,
            period,
            residues: (threshold..threshold + period)
                .filter(|&n| at(n))
                .map(|n| n % period)
                .collect(),
        }
        .canonical()
    }

    pub fn complement(&self) -> EPSet {
        EPSet {
            transient: (0..self.threshold)
                .filter(|n| !self.transient.contains(n))
                .collect(),
            threshold: self.threshold,
            period: self.period,
            residues: (0..self.period)
                .filter(|r| !self.residues.contains(r))
                .collect(),
        }
    }

    pub fn union(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a && b)
    }

    /// Symmetric difference, the ring sum.
    pub fn sum(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a != b)
    }

    /// Intersection, the ring product.
    pub fn product(&self, other: &EPSet) -> EPSet {
        self.intersection(other)
    }

    pub fn minus(&self, other: &EPSet) -> EPSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &EPSet) -> bool {
        self.minus(other) == EPSet::empty()
    }

    /// Whether two possibly non-canonical descriptions denote the same set.
    ///
    /// For `n ≥ T = max(T₁, T₂)` both memberships depend only on `n mod L`
    /// with `L = lcm(p₁, p₂)`, so the pair of memberships at `n` equals the
    /// pair at some `n' ∈ [T, T + L)`. Agreement on `[0, T + L)` therefore
    /// gives agreement everywhere.
    pub fn denotation_eq(a: &EPSet, b: &EPSet) -> bool {
        let cutoff = a.threshold.max(b.threshold) + a.period.lcm(&b.period);
        (0..cutoff).all(|n| a.contains(n) == b.contains(n))
    }

    /// Elements below `bound`.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&n| self.contains(n)).collect()
    }
}

fn list(xs: &BTreeSet<u64>) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "EP{{transient=[{}]; T={}; p={}; R=[{}]}}",
            list(&self.transient),
            self.threshold,
            self.period,
            list(&self.residues)
        )
    }
}

impl fmt::Debug for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for EPSet {
    type Err = EpError;

    /// Parses `EP{transient=[..]; T=t; p=n; R=[..]}`; fields may come in any
    /// order and the result is canonicalized.
    fn from_str(s: &str) -> Result<EPSet, EpError> {
        let syntax = |reason: &str| EpError::Syntax {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let body = s
            .trim()
            .strip_prefix("EP")
            .map(str::trim_start)
            .and_then(|r| r.strip_prefix('{'))
            .and_then(|r| r.trim_end().strip_suffix('}'))
            .ok_or_else(|| syntax("expected `EP{...}`"))?;
        let (mut transient, mut threshold, mut period, mut residues) = (None, None, None, None);
        for field in body.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| syntax("expected `key=value`"))?;
            let value = value.trim();
            let number = |v: &str| v.parse::<u64>().map_err(|_| syntax("expected a number"));
            let numbers = |v: &str| -> Result<Vec<u64>, EpError> {
                let inner = v
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| syntax("expected a bracketed list"))?;
                inner
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(number)
                    .collect()
            };
            match key.trim() {
                "transient" => transient = Some(numbers(value)?),
                "T" => threshold = Some(number(value)?),
                "p" => period = Some(number(value)?),
                "R" => residues = Some(numbers(value)?),
                other => return Err(syntax(&format!("unknown field `{other}`"))),
            }
        }
        EPSet::new(
            transient.ok_or_else(|| syntax("missing `transient`"))?,
            threshold.ok_or_else(|| syntax("missing `T`"))?,
            period.ok_or_else(|| syntax("missing `p`"))?,
            residues.ok_or_else(|| syntax("missing `R`"))?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> EPSet {
        EPSet::periodic(2, [0])
    }

    #[test]
    fn complement_of_evens() {
        assert_eq!(evens().complement(), EPSet::periodic(2, [1]));
    }

    #[test]
    fn sum_with_self_is_empty() {
        let a = EPSet::new([1, 4], 5, 3, [0, 2]).unwrap();
        assert_eq!(a.sum(&a), EPSet::empty());
    }

    #[test]
    fn union_pointwise() {
        let u = EPSet::finite([1, 3]).union(&evens());
        for n in 0..=40 {
            let expected = n == 1 || n == 3 || n % 2 == 0;
            assert_eq!(u.contains(n), expected, "{n}");
        }
        assert_eq!(u, EPSet::new([0, 1, 2, 3], 4, 2, [0]).unwrap());
    }

    #[test]
    fn cards_and_residues() {
        assert_eq!(EPSet::finite([1, 3, 5]).card(), Card::Finite(3));
        assert_eq!(evens().card(), Card::Infinite);
        assert_eq!(EPSet::finite([0, 1]).residue(2), Some(0));
        assert_eq!(evens().residue(2), None);
    }

    #[test]
    fn canonical_forms() {
        // Period 4 pattern {0, 2} is period 2; a leading element that matches
        // the pattern is absorbed into the periodic part.
        let a = EPSet::new([0], 1, 4, [0, 2]).unwrap();
        assert_eq!((a.threshold(), a.period()), (0, 2));
        let b = EPSet::new([0, 1, 2], 3, 1, [0]).unwrap();
        assert_eq!(b, EPSet::full());
        assert!(EPSet::new([3], 2, 1, []).is_err());
        assert!(EPSet::new([], 0, 0, []).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a: EPSet = "EP{transient=[0,1]; T=2; p=1; R=[]}".parse().unwrap();
        assert_eq!(a, EPSet::finite([0, 1]));
        assert_eq!(a.to_string(), "EP{transient=[0,1]; T=2; p=1; R=[]}");
        let b: EPSet = "EP{ T=0; p=2; R=[0]; transient=[] }".parse().unwrap();
        assert_eq!(b, evens());
        assert!("EP{T=0; p=2}".parse::<EPSet>().is_err());
        assert!("EP{transient=[]; T=0; p=2; R=[2]}".parse::<EPSet>().is_err());
    }
}
