use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

pub const MIN_TRIALS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub frequency: f64,
    pub half_width: f64,
    pub trials: u64,
    pub successes: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let frequency = successes as f64 / trials as f64;
        let half_width = Z_99 * (frequency * (1.0 - frequency) / trials as f64).sqrt();
        Self { frequency, half_width, trials, successes }
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.frequency - value).abs() <= self.half_width
    }
}

/// Runs `trial` for `0..trials` in parallel, trial `i` on its own stream
/// derived from `(seed, i)`, and counts successes.
pub fn monte_carlo<F>(trials: u64, seed: u64, trial: F) -> Result<Estimate>
where
    F: Fn(&mut SeededRng) -> Result<bool> + Sync,
{
    if trials < MIN_TRIALS {
        return Err(Error::contract(format!("at least {MIN_TRIALS} trials are required, got {trials}")));
    }
    let successes = (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut SeededRng::for_trial(seed, i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::from_counts(successes, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::ChoiceBit;

    #[test]
    fn deterministic_success() {
        let e = monte_carlo(500, 1, |_| Ok(true)).unwrap();
        assert_eq!(e.frequency, 1.0);
        assert_eq!(e.half_width, 0.0);
    }

    #[test]
    fn fair_coin() {
        let e = monte_carlo(10_000, 9, |rng| Ok(ChoiceBit::random(rng).value())).unwrap();
        assert!(e.half_width <= 0.013);
        assert!(e.contains(0.5), "{e:?}");
    }

    #[test]
    fn same_seed_same_estimate() {
        let f = |rng: &mut SeededRng| Ok(ChoiceBit::random(rng).value());
        assert_eq!(monte_carlo(1000, 3, f).unwrap(), monte_carlo(1000, 3, f).unwrap());
    }

    #[test]
    fn too_few_trials() {
        assert!(monte_carlo(99, 0, |_| Ok(true)).is_err());
    }
}
