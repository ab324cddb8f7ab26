//! Randomness sources.
//!
//! Every random choice a protocol makes is a call to [`Randomness::below`].
//! Simulations use [`SeededRng`]; exact analysis replays explicit tapes and
//! walks every possible tape with [`enumerate_tapes`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest number of tapes the exact engine will walk.
pub const ENUMERATION_BOUND: u64 = 1 << 24;

pub trait Randomness {
    /// Uniform draw from `0..n`. `n` must be at least 1.
    fn below(&mut self, n: u64) -> u64;
}

/// Reproducible pseudo-random source. Same seed, same stream.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for trial `index` of an experiment seeded with `seed`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index.wrapping_add(1));
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Randomness for SeededRng {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n >= 1, "empty range");
        self.inner.gen_range(0..n)
    }
}

/// One recorded draw: the value taken and the size of its range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Draw {
    pub value: u64,
    pub range: u64,
}

/// Replays a fixed prefix of draws, then answers 0 for anything beyond it
/// while recording the ranges requested.
#[derive(Clone, Debug, Default)]
pub struct ReplayTape {
    draws: Vec<Draw>,
    pos: usize,
}

impl ReplayTape {
    pub fn new(values: &[(u64, u64)]) -> Self {
        Self {
            draws: values.iter().map(|&(value, range)| Draw { value, range }).collect(),
            pos: 0,
        }
    }

    pub fn draws(&self) -> &[Draw] {
        &self.draws[..self.pos]
    }

    fn rewind(&mut self) {
        self.pos = 0;
    }
}

impl Randomness for ReplayTape {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n >= 1, "empty range");
        if self.pos < self.draws.len() {
            let d = &mut self.draws[self.pos];
            // a replayed prefix must be consumed with the same ranges; if the
            // program's shape changed, clamp instead of walking off the range
            if d.range != n {
                d.range = n;
                d.value = d.value.min(n - 1);
            }
            self.pos += 1;
            d.value
        } else {
            self.draws.push(Draw { value: 0, range: n });
            self.pos += 1;
            0
        }
    }
}

/// Probability of one tape: the product of `1 / range` over its draws.
pub fn tape_probability(draws: &[Draw]) -> BigRational {
    let denom = draws.iter().fold(BigInt::one(), |acc, d| acc * BigInt::from(d.range));
    BigRational::new(BigInt::one(), denom)
}

/// Runs `f` once on every possible tape and returns each result with the
/// exact probability of its tape.
///
/// `f` must be deterministic in the tape. Tapes may differ in length: the walk
/// is a depth-first traversal of the draw tree, so every leaf is visited once.
/// Fails with [`Error::EnumerationBound`] once more than `bound` leaves would
/// be needed.
pub fn enumerate_tapes<T, F>(bound: u64, mut f: F) -> Result<Vec<(T, BigRational)>>
where
    F: FnMut(&mut dyn Randomness) -> Result<T>,
{
    let mut out = Vec::new();
    let mut tape = ReplayTape::default();
    loop {
        tape.rewind();
        let value = f(&mut tape)?;
        let used = tape.pos;
        tape.draws.truncate(used);
        if out.is_empty() {
            // the first leaf already tells us the size of the full product
            let estimate = tape.draws.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.range));
            if estimate.is_none_or(|n| n > bound) {
                return Err(Error::EnumerationBound { bound });
            }
        }
        if out.len() as u64 >= bound {
            return Err(Error::EnumerationBound { bound });
        }
        out.push((value, tape_probability(&tape.draws)));

        // advance the odometer: bump the deepest draw that still has room
        loop {
            match tape.draws.last_mut() {
                None => return Ok(out),
                Some(d) if d.value + 1 < d.range => {
                    d.value += 1;
                    break;
                }
                Some(_) => {
                    tape.draws.pop();
                }
            }
        }
    }
}
