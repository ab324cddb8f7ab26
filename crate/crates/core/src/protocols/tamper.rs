//! Cut-and-choose tamper detection.
//!
//! `k` runs are made on fresh random inputs. A uniformly random subset of
//! `m` of them is opened: Alice and Bob compare inputs and output over a
//! direct authenticated channel and abort on any mismatch. The first
//! unopened run is then re-based onto the real inputs: Bob announces
//! `d = c + e` where `e` was that run's choice, Alice replies with
//! `z0 = s0 + x_d` and `z1 = s1 + x_{1+d}`, and Bob outputs `z_c + y`.

use serde::Serialize;

use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::netsim::{Adversary, CorruptionSet};
use crate::protocols::{run_session, Network, PathOtInstance};
use crate::rng::Randomness;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TamperConfig {
    pub k: usize,
    pub open_fraction: f64,
}

impl TamperConfig {
    pub fn new(k: usize, open_fraction: f64) -> Result<Self> {
        let config = Self { k, open_fraction };
        if k < 2 {
            return Err(Error::contract("at least two runs are needed"));
        }
        let m = config.opened();
        if !(0.0..=1.0).contains(&open_fraction) || m >= k {
            return Err(Error::contract(format!("opening {m} of {k} runs leaves nothing to use")));
        }
        Ok(config)
    }

    /// Number of opened runs.
    pub fn opened(&self) -> usize {
        (self.open_fraction * self.k as f64).round() as usize
    }
}

/// One test run on random inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TestRun {
    pub s0: BitString,
    pub s1: BitString,
    pub c: ChoiceBit,
    pub output: BitString,
}

impl TestRun {
    pub fn consistent(&self) -> bool {
        self.output == if self.c.value() { self.s1 } else { self.s0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TamperOutcome {
    pub output: BitString,
    pub opened: Vec<usize>,
    pub rebased_run: usize,
    pub runs: Vec<TestRun>,
}

/// Full check. An inconsistent opened run ends in [`Error::Abort`].
pub fn tamper_check_run(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    config: &TamperConfig,
    adversary: Option<&mut dyn Adversary>,
    rng: &mut dyn Randomness,
) -> Result<TamperOutcome> {
    let runs = test_runs(instance, network, corruption, config.k, adversary, rng)?;
    let opened = choose_opened(config.k, config.opened(), rng);
    check_opened(&runs, &opened)?;
    let rebased_run = (0..config.k).find(|i| !opened.contains(i)).expect("one run stays closed");
    let output = rebase(instance, &runs[rebased_run])?;
    Ok(TamperOutcome { output, opened, rebased_run, runs })
}

/// The `k` runs on random inputs, run `i` as session `i`.
pub fn test_runs(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    k: usize,
    mut adversary: Option<&mut dyn Adversary>,
    rng: &mut dyn Randomness,
) -> Result<Vec<TestRun>> {
    (0..k)
        .map(|i| {
            let adv = adversary.as_mut().map(|a| &mut **a as &mut dyn Adversary);
            test_run(instance, network, corruption, i as u32, adv, rng)
        })
        .collect()
}

/// One run on fresh random inputs of the instance's length and variant.
pub fn test_run(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    session: u32,
    adversary: Option<&mut dyn Adversary>,
    rng: &mut dyn Randomness,
) -> Result<TestRun> {
    let ell = instance.ell();
    let s0 = BitString::random(ell, rng)?;
    let s1 = BitString::random(ell, rng)?;
    let c = ChoiceBit::random(rng);
    let test = PathOtInstance::new(s0, s1, c, instance.variant)?;
    let run = run_session(&test, network, corruption, adversary, session, rng)?;
    Ok(TestRun { s0, s1, c, output: run.bob_output })
}

/// A uniform `m`-subset of `0..k`, sorted.
pub fn choose_opened(k: usize, m: usize, rng: &mut dyn Randomness) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..k).collect();
    let mut opened = Vec::with_capacity(m);
    for _ in 0..m {
        let i = rng.below(pool.len() as u64) as usize;
        opened.push(pool.remove(i));
    }
    opened.sort_unstable();
    opened
}

pub fn check_opened(runs: &[TestRun], opened: &[usize]) -> Result<()> {
    match opened.iter().find(|&&i| !runs[i].consistent()) {
        Some(&run) => Err(Error::Abort { run }),
        None => Ok(()),
    }
}

/// Turns a test run into OT on the real inputs.
pub fn rebase(instance: &PathOtInstance, run: &TestRun) -> Result<BitString> {
    let d = instance.choice.xor(run.c);
    let x = [run.s0, run.s1];
    let z0 = instance.s0.xor(&x[d.as_index()])?;
    let z1 = instance.s1.xor(&x[d.flipped().as_index()])?;
    let z = if instance.choice.value() { z1 } else { z0 };
    z.xor(&run.output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::fixtures;
    use crate::protocols::Variant;
    use crate::rng::{enumerate_tapes, SeededRng, ENUMERATION_BOUND};
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    #[test]
    fn honest_check_accepts_and_rebases() {
        let (t, p) = fixtures::diamond().unwrap();
        let network = Network::new(t, p);
        let corruption = CorruptionSet::honest(&network.topology);
        let config = TamperConfig::new(4, 0.5).unwrap();
        let mut rng = SeededRng::new(5);
        for s0 in BitString::all(2).unwrap() {
            for c in ChoiceBit::both() {
                let inst = PathOtInstance::new(s0, "10".parse().unwrap(), c, Variant::Protocol1).unwrap();
                let out = tamper_check_run(&inst, &network, &corruption, &config, None, &mut rng).unwrap();
                assert_eq!(out.output, inst.expected());
                assert_eq!(out.opened.len(), 2);
            }
        }
    }

    #[test]
    fn rebase_is_exact_for_every_test_run() {
        for x0 in BitString::all(1).unwrap() {
            for x1 in BitString::all(1).unwrap() {
                for e in ChoiceBit::both() {
                    for c in ChoiceBit::both() {
                        let run = TestRun { s0: x0, s1: x1, c: e, output: if e.value() { x1 } else { x0 } };
                        let inst = PathOtInstance::new("0".parse().unwrap(), "1".parse().unwrap(), c, Variant::Protocol1)
                            .unwrap();
                        assert_eq!(rebase(&inst, &run).unwrap(), inst.expected());
                    }
                }
            }
        }
    }

    #[test]
    fn opened_subsets_are_uniform() {
        let dist = enumerate_tapes(ENUMERATION_BOUND, |rng| Ok(choose_opened(4, 2, rng))).unwrap();
        let mut mass = std::collections::BTreeMap::new();
        for (set, p) in dist {
            *mass.entry(set).or_insert_with(BigRational::zero) += p;
        }
        assert_eq!(mass.len(), 6);
        let sixth = BigRational::one() / BigRational::from_integer(6.into());
        assert!(mass.values().all(|p| *p == sixth));
    }

    #[test]
    fn config_validation() {
        assert!(TamperConfig::new(1, 0.5).is_err());
        assert!(TamperConfig::new(4, 1.0).is_err());
        assert_eq!(TamperConfig::new(8, 0.5).unwrap().opened(), 4);
    }
}
