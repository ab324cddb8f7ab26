//! Bob colluding with every intermediary against Protocol 1.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::adversary::ChoiceVector;
use crate::analysis::{exact_distribution, sender_guessing};
use crate::bits::{reconstruct_xor, BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::linkot::OtLeak;
use crate::netsim::{AdversaryView, Controller, CorruptionSet};
use crate::protocols::{run_path_ot, Network, PathOtInstance, Variant};
use crate::rng::Randomness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollusionOutcome {
    /// `t_{d_1,1} + ... + t_{d_N,N}`.
    pub learned: BitString,
    /// `d_1 + ... + d_N`: the input the coalition learned.
    pub determined: ChoiceBit,
    /// Guessing probability of the other input, over uniform inputs.
    pub hidden_guess: BigRational,
    /// The other input is uniform given every view.
    pub hidden_posterior_uniform: bool,
}

/// Bob plus all intermediaries.
pub fn full_collusion(network: &Network) -> Result<CorruptionSet> {
    CorruptionSet::new(&network.topology, network.paths.internal_nodes(), Controller::Bob)
}

/// XOR of every link-OT output the coalition received on the protocol's sessions.
pub fn combine_received(view: &AdversaryView, n: usize) -> Result<BitString> {
    let mut by_ot = BTreeMap::new();
    for leak in &view.ot_leaks {
        if let OtLeak::Receiver { ot, received, .. } = leak {
            by_ot.insert(*ot, *received);
        }
    }
    if by_ot.len() != n {
        return Err(Error::contract("the coalition does not hold every link-OT output"));
    }
    reconstruct_xor(&by_ot.into_values().collect::<Vec<_>>())
}

pub fn colluding_bob_attack(
    d: &[ChoiceBit],
    instance: &PathOtInstance,
    network: &Network,
    rng: &mut dyn Randomness,
) -> Result<CollusionOutcome> {
    if instance.variant != Variant::Protocol1 {
        return Err(Error::contract("the choice-vector attack targets Protocol 1"));
    }
    if d.len() != network.paths.len() {
        return Err(Error::contract(format!("need {} choices, got {}", network.paths.len(), d.len())));
    }
    let corruption = full_collusion(network)?;
    let mut adversary = ChoiceVector::new(d.to_vec());
    let run = run_path_ot(instance, network, &corruption, Some(&mut adversary), rng)?;
    let learned = combine_received(&run.view, d.len())?;
    let determined = reconstruct_xor(d)?;
    let ell = instance.ell();
    let g = sender_guessing(Variant::Protocol1, network, &corruption, ell, d)?;
    let hidden_guess = g.per_input[determined.flipped().as_index()].clone();
    let hidden_posterior_uniform = hidden_posterior_uniform(network, &corruption, ell, d, determined.flipped())?;
    Ok(CollusionOutcome { learned, determined, hidden_guess, hidden_posterior_uniform })
}

/// For every view, each value of `s_hidden` is equally likely.
fn hidden_posterior_uniform(
    network: &Network,
    corruption: &CorruptionSet,
    ell: usize,
    d: &[ChoiceBit],
    hidden: ChoiceBit,
) -> Result<bool> {
    let joint = exact_distribution(|rng| {
        let s0 = BitString::random(ell, rng)?;
        let s1 = BitString::random(ell, rng)?;
        let c = ChoiceBit::random(rng);
        let inst = PathOtInstance::new(s0, s1, c, Variant::Protocol1)?;
        let mut adversary = ChoiceVector::new(d.to_vec());
        let view = run_path_ot(&inst, network, corruption, Some(&mut adversary), rng)?.view;
        Ok((view, if hidden.value() { s1 } else { s0 }))
    })?;
    let mut per_view: BTreeMap<&AdversaryView, BTreeMap<BitString, BigRational>> = BTreeMap::new();
    for ((view, s), p) in joint.iter() {
        per_view.entry(view).or_default().insert(*s, p.clone());
    }
    let size = 1usize << ell;
    Ok(per_view.values().all(|m| m.len() == size && m.values().all(|p| p == m.values().next().expect("nonempty"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::inverse_power_of_two;
    use crate::netsim::fixtures;
    use crate::rng::SeededRng;

    #[test]
    fn every_choice_vector_leaves_one_input_hidden() {
        let (t, p) = fixtures::diamond().unwrap();
        let network = Network::new(t, p);
        let inst = PathOtInstance::new("0".parse().unwrap(), "1".parse().unwrap(), ChoiceBit::ONE, Variant::Protocol1)
            .unwrap();
        for d in ChoiceVector::all(2) {
            let o = colluding_bob_attack(&d, &inst, &network, &mut SeededRng::new(3)).unwrap();
            let expected = if o.determined.value() { inst.s1 } else { inst.s0 };
            assert_eq!(o.learned, expected);
            assert_eq!(o.hidden_guess, inverse_power_of_two(1));
            assert!(o.hidden_posterior_uniform);
        }
    }
}
