//! Tampering intermediaries and the odds of catching them.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::adversary::FlipChoiceShare;
use crate::analysis::exact_distribution;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::netsim::{Adversary, Controller, CorruptionSet};
use crate::protocols::{check_opened, choose_opened, run_path_ot, test_run, Network, PathOtInstance, TestRun};
use crate::rng::{enumerate_tapes, Randomness, ENUMERATION_BOUND};

/// The first intermediary of path `j`, corrupted on its own.
pub fn path_tamperer(network: &Network, j: usize) -> Result<CorruptionSet> {
    if j >= network.paths.len() {
        return Err(Error::contract(format!("no path {j}")));
    }
    let node = network
        .paths
        .internal(j)
        .first()
        .ok_or_else(|| Error::contract(format!("path {j} has no intermediary to corrupt")))?;
    CorruptionSet::new(&network.topology, [node.clone()], Controller::Independent)
}

/// Bob's output when a node on path `j` flips `c_j` and everything else is honest.
pub fn tamper_attack(
    flip_target: usize,
    instance: &PathOtInstance,
    network: &Network,
    rng: &mut dyn Randomness,
) -> Result<BitString> {
    let corruption = path_tamperer(network, flip_target)?;
    let mut adversary = FlipChoiceShare::always(flip_target);
    Ok(run_path_ot(instance, network, &corruption, Some(&mut adversary), rng)?.bob_output)
}

/// Probability, over the opened subset only, that the check aborts on these runs.
pub fn detection_given_runs(runs: &[TestRun], opened: usize) -> Result<BigRational> {
    let outcomes = enumerate_tapes(ENUMERATION_BOUND, |rng| {
        let subset = choose_opened(runs.len(), opened, rng);
        Ok(check_opened(runs, &subset).is_err())
    })?;
    Ok(outcomes.into_iter().filter(|(caught, _)| *caught).fold(BigRational::zero(), |acc, (_, p)| acc + p))
}

/// Per run `i`, the exact probability that it comes out consistent under the
/// adversary built by `make`. Runs use independent tapes.
pub fn consistency_probabilities<A: Adversary>(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    k: usize,
    mut make: impl FnMut() -> A,
) -> Result<Vec<BigRational>> {
    (0..k)
        .map(|i| {
            let d = exact_distribution(|rng| {
                let mut adversary = make();
                Ok(test_run(instance, network, corruption, i as u32, Some(&mut adversary), rng)?.consistent())
            })?;
            Ok(d.prob(&true))
        })
        .collect()
}

/// Exact abort probability of the full check: the opened subset is
/// enumerated and each opened run passes independently with probability `q[i]`.
pub fn detection_probability(consistent: &[BigRational], opened: usize) -> Result<BigRational> {
    let outcomes = enumerate_tapes(ENUMERATION_BOUND, |rng| Ok(choose_opened(consistent.len(), opened, rng)))?;
    let mut caught = BigRational::zero();
    for (subset, p) in outcomes {
        let pass = subset.iter().fold(BigRational::one(), |acc, &i| acc * &consistent[i]);
        caught += p * (BigRational::one() - pass);
    }
    Ok(caught)
}
