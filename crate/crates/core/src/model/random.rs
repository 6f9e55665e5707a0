use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ast::Var;

use super::{Assignment, EPSet};

/// Sampling limits: threshold at most `max_transient`, period at most
/// `max_period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpBounds {
    pub max_transient: u64,
    pub max_period: u64,
}

impl Default for EpBounds {
    fn default() -> Self {
        EpBounds {
            max_transient: 8,
            max_period: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SampleMode {
    /// Finite, cofinite, and infinite-coinfinite sets, a third each.
    All,
    /// Finite and cofinite sets, half each.
    FiniteCofinite,
}

/// A deterministic sample for `seed`.
pub fn random_ep(seed: u64, bounds: EpBounds) -> EPSet {
    random_ep_with(&mut ChaCha8Rng::seed_from_u64(seed), bounds, SampleMode::All)
}

/// Draws one set. The threshold, the period and each transient bit are
/// uniform; the residue set is empty (finite), full (cofinite), or a
/// uniform nonempty proper subset. With `max_period = 1` there are no
/// proper subsets and that third falls back to finite or cofinite.
pub fn random_ep_with<R: Rng + ?Sized>(rng: &mut R, bounds: EpBounds, mode: SampleMode) -> EPSet {
    let t = rng.gen_range(0..=bounds.max_transient);
    let transient: Vec<u64> = (0..t).filter(|_| rng.gen_bool(0.5)).collect();
    let max_p = bounds.max_period.max(1);
    let kind = match mode {
        SampleMode::All => rng.gen_range(0..3u8),
        SampleMode::FiniteCofinite => rng.gen_range(0..2u8),
    };
    let kind = if kind == 2 && max_p < 2 {
        rng.gen_range(0..2u8)
    } else {
        kind
    };
    let (p, residues): (u64, Vec<u64>) = match kind {
        0 => (rng.gen_range(1..=max_p), vec![]),
        1 => {
            let p = rng.gen_range(1..=max_p);
            (p, (0..p).collect())
        }
        _ => {
            let p = rng.gen_range(2..=max_p);
            let mut all: Vec<u64> = (0..p).collect();
            all.shuffle(rng);
            let size = rng.gen_range(1..p) as usize;
            (p, all.into_iter().take(size).collect())
        }
    };
    EPSet::new(transient, t, p, residues).expect("in range by construction")
}

/// Independent samples for each variable.
pub fn random_assignment<R: Rng + ?Sized>(
    rng: &mut R,
    vars: &[Var],
    bounds: EpBounds,
    mode: SampleMode,
) -> Assignment {
    vars.iter()
        .map(|v| (v.clone(), random_ep_with(rng, bounds, mode)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_reproduce() {
        let b = EpBounds::default();
        assert_eq!(random_ep(17, b), random_ep(17, b));
    }

    #[test]
    fn proportions_and_bounds() {
        let b = EpBounds::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let n = 3000;
        let mut finite = 0;
        for _ in 0..n {
            let s = random_ep_with(&mut rng, b, SampleMode::All);
            assert!(s.threshold() <= b.max_transient && s.period() <= b.max_period);
            if s.is_finite() {
                finite += 1;
            }
        }
        let frac = finite as f64 / n as f64;
        assert!((frac - 1.0 / 3.0).abs() <= 0.05, "finite fraction {frac}");
    }

    #[test]
    fn finite_cofinite_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = random_ep_with(&mut rng, EpBounds::default(), SampleMode::FiniteCofinite);
            assert!(s.is_finite_or_cofinite());
        }
    }
}
