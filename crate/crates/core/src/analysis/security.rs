//! Exact security metrics for the path-OT variants.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::adversary::ChoiceVector;
use crate::analysis::{
    exact_distribution, guessing_probability, inverse_power_of_two, statistical_distance, Distribution, ViewDistribution,
};
use crate::bits::{BitString, ChoiceBit};
use crate::error::Result;
use crate::netsim::{AdversaryView, Controller, CorruptionSet};
use crate::protocols::{run_path_ot, Network, PathOtInstance, Variant};

/// Alice-side coalition view distribution for a fixed `c`, over uniform
/// inputs and all tapes.
pub fn receiver_view_distribution(
    variant: Variant,
    network: &Network,
    corrupted: &CorruptionSet,
    ell: usize,
    choice: ChoiceBit,
) -> Result<ViewDistribution> {
    let corruption = corrupted.with_controller(Controller::Alice);
    exact_distribution(|rng| {
        let s0 = BitString::random(ell, rng)?;
        let s1 = BitString::random(ell, rng)?;
        let inst = PathOtInstance::new(s0, s1, choice, variant)?;
        Ok(run_path_ot(&inst, network, &corruption, None, rng)?.view)
    })
}

/// Statistical distance between the Alice-side views under `c = 0` and `c = 1`.
pub fn epsilon_receiver(variant: Variant, network: &Network, corrupted: &CorruptionSet, ell: usize) -> Result<BigRational> {
    let d0 = receiver_view_distribution(variant, network, corrupted, ell, ChoiceBit::ZERO)?;
    let d1 = receiver_view_distribution(variant, network, corrupted, ell, ChoiceBit::ONE)?;
    Ok(statistical_distance(&d0, &d1))
}

/// What the Bob-side coalition can guess about Alice's inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SenderGuess {
    /// `[G_0, G_1]`: optimal guessing probability of each input on its own.
    pub per_input: [BigRational; 2],
    /// `sum_v min_b max_s Pr[s_b = s, v]`: the guessing probability of
    /// whichever input is worse known in each view.
    pub hidden: BigRational,
}

/// Guessing probabilities for the Bob-side coalition whose link-OT choices
/// follow `d`. Inputs and `c` are uniform.
pub fn sender_guessing(
    variant: Variant,
    network: &Network,
    corrupted: &CorruptionSet,
    ell: usize,
    d: &[ChoiceBit],
) -> Result<SenderGuess> {
    let corruption = corrupted.with_controller(Controller::Bob);
    let joint = exact_distribution(|rng| {
        let s0 = BitString::random(ell, rng)?;
        let s1 = BitString::random(ell, rng)?;
        let c = ChoiceBit::random(rng);
        let inst = PathOtInstance::new(s0, s1, c, variant)?;
        let mut adversary = ChoiceVector::new(d.to_vec());
        let view = run_path_ot(&inst, network, &corruption, Some(&mut adversary), rng)?.view;
        Ok((s0, s1, view))
    })?;
    let j0 = joint.map(|(s0, _, v)| (*s0, v.clone()));
    let j1 = joint.map(|(_, s1, v)| (*s1, v.clone()));
    let best0 = best_guess_per_view(&j0);
    let best1 = best_guess_per_view(&j1);
    let hidden = best0
        .iter()
        .map(|(v, p0)| p0.clone().min(best1.get(v).cloned().unwrap_or_else(BigRational::zero)))
        .fold(BigRational::zero(), |acc, p| acc + p);
    Ok(SenderGuess { per_input: [guessing_probability(&j0), guessing_probability(&j1)], hidden })
}

fn best_guess_per_view(joint: &Distribution<(BitString, AdversaryView)>) -> BTreeMap<AdversaryView, BigRational> {
    let mut best: BTreeMap<AdversaryView, BigRational> = BTreeMap::new();
    for ((_, v), p) in joint.iter() {
        let slot = best.entry(v.clone()).or_insert_with(BigRational::zero);
        if p > slot {
            *slot = p.clone();
        }
    }
    best
}

/// Result of the sender-security sweep over all choice vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SenderSecurity {
    /// `max_d (G_hidden - 2^-ell)`.
    pub epsilon: BigRational,
    pub per_vector: Vec<(Vec<ChoiceBit>, SenderGuess)>,
}

impl SenderSecurity {
    /// Under every `d`, each view leaves some input exactly uniform.
    pub fn one_input_always_hidden(&self, ell: usize) -> bool {
        let floor = inverse_power_of_two(ell);
        self.per_vector.iter().all(|(_, g)| g.hidden == floor)
    }
}

pub fn epsilon_sender(variant: Variant, network: &Network, corrupted: &CorruptionSet, ell: usize) -> Result<SenderSecurity> {
    let floor = inverse_power_of_two(ell);
    let mut epsilon = BigRational::zero();
    let mut per_vector = Vec::new();
    for d in ChoiceVector::all(network.paths.len()) {
        let g = sender_guessing(variant, network, corrupted, ell, &d)?;
        let excess = g.hidden.clone() - &floor;
        if excess > epsilon {
            epsilon = excess;
        }
        per_vector.push((d, g));
    }
    Ok(SenderSecurity { epsilon, per_vector })
}

/// Fraction of (inputs, choice, tape) on which honest Bob outputs `s_c`.
pub fn correctness_rate(variant: Variant, network: &Network, ell: usize) -> Result<BigRational> {
    let honest = CorruptionSet::honest(&network.topology);
    let d = exact_distribution(|rng| {
        let s0 = BitString::random(ell, rng)?;
        let s1 = BitString::random(ell, rng)?;
        let c = ChoiceBit::random(rng);
        let inst = PathOtInstance::new(s0, s1, c, variant)?;
        Ok(run_path_ot(&inst, network, &honest, None, rng)?.bob_output == inst.expected())
    })?;
    Ok(d.prob(&true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ratio;
    use crate::netsim::fixtures;
    use num_traits::One;

    fn net(n: usize) -> Network {
        let (t, p) = fixtures::with_paths(n).unwrap();
        Network::new(t, p)
    }

    #[test]
    fn diamond_one_corrupt_relay_hides_choice() {
        let network = net(2);
        let m = CorruptionSet::from_names(&network.topology, &["v2"], Controller::Alice).unwrap();
        assert_eq!(epsilon_receiver(Variant::Protocol1, &network, &m, 1).unwrap(), BigRational::zero());
    }

    #[test]
    fn line_corrupt_relay_leaks_choice() {
        let network = net(1);
        let m = CorruptionSet::from_names(&network.topology, &["v"], Controller::Alice).unwrap();
        assert_eq!(epsilon_receiver(Variant::Protocol1, &network, &m, 1).unwrap(), BigRational::one());
    }

    #[test]
    fn protocol2_hides_choice_even_with_all_relays_corrupt() {
        let network = net(2);
        let m = CorruptionSet::from_names(&network.topology, &["v1", "v2"], Controller::Alice).unwrap();
        assert_eq!(epsilon_receiver(Variant::Protocol2, &network, &m, 1).unwrap(), BigRational::zero());
    }

    #[test]
    fn protocol1_sender_secure_against_full_collusion() {
        let network = net(2);
        let m = CorruptionSet::from_names(&network.topology, &["v1", "v2"], Controller::Bob).unwrap();
        let s = epsilon_sender(Variant::Protocol1, &network, &m, 2).unwrap();
        assert_eq!(s.epsilon, BigRational::zero());
        assert!(s.one_input_always_hidden(2));
        assert_eq!(s.per_vector.len(), 4);
        for (_, g) in &s.per_vector {
            assert_eq!(g.hidden, ratio(1, 4));
            let mut sorted = g.per_input.clone();
            sorted.sort();
            assert_eq!(sorted, [ratio(1, 4), BigRational::one()]);
        }
    }

    #[test]
    fn protocol2_sender_leaks_without_honest_path() {
        let network = net(1);
        let m = CorruptionSet::from_names(&network.topology, &["v"], Controller::Bob).unwrap();
        let s = epsilon_sender(Variant::Protocol2, &network, &m, 1).unwrap();
        assert_eq!(s.epsilon, ratio(1, 2));
    }

    #[test]
    fn learned_input_may_vary_between_views() {
        // with v1 honest, which input leaks depends on Bob's share c_1
        let network = net(2);
        let m = CorruptionSet::from_names(&network.topology, &["v2"], Controller::Bob).unwrap();
        let s = epsilon_sender(Variant::Protocol1, &network, &m, 1).unwrap();
        assert_eq!(s.epsilon, BigRational::zero());
        assert!(s.per_vector.iter().all(|(_, g)| g.per_input == [ratio(3, 4), ratio(3, 4)]));
    }

    #[test]
    fn honest_correctness_is_one() {
        for v in Variant::ALL {
            assert_eq!(correctness_rate(v, &net(2), 1).unwrap(), BigRational::one());
        }
    }
}
