//! What each side learns from the four-input OT built from both protocols.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::adversary::{ChoiceVector, Stacked};
use crate::analysis::{exact_distribution, statistical_distance, Distribution};
use crate::bits::{BitString, ChoiceBit};
use crate::error::Result;
use crate::netsim::{Adversary, AdversaryView, Controller, CorruptionSet};
use crate::protocols::{run_weak_ot, Network, WeakOtInstance, WEAK_SESSION_P1, WEAK_SESSION_P2};
use crate::rng::Randomness;

/// Per view, how many of the four inputs are pinned down and how many stay
/// exactly uniform. Extremes over every view and strategy tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InputKnowledge {
    pub max_determined: usize,
    pub min_determined: usize,
    pub min_uniform: usize,
}

impl InputKnowledge {
    fn merge(self, other: Self) -> Self {
        Self {
            max_determined: self.max_determined.max(other.max_determined),
            min_determined: self.min_determined.min(other.min_determined),
            min_uniform: self.min_uniform.min(other.min_uniform),
        }
    }
}

type Inputs = [BitString; 4];

fn random_inputs(ell: usize, rng: &mut dyn Randomness) -> Result<[[BitString; 2]; 2]> {
    Ok([
        [BitString::random(ell, rng)?, BitString::random(ell, rng)?],
        [BitString::random(ell, rng)?, BitString::random(ell, rng)?],
    ])
}

fn knowledge(joint: &Distribution<(AdversaryView, Inputs)>, ell: usize) -> InputKnowledge {
    let mut by_view: BTreeMap<&AdversaryView, Vec<(&Inputs, &BigRational)>> = BTreeMap::new();
    for ((view, inputs), p) in joint.iter() {
        by_view.entry(view).or_default().push((inputs, p));
    }
    let mut out = InputKnowledge { max_determined: 0, min_determined: 4, min_uniform: 4 };
    for rows in by_view.values() {
        let (mut determined, mut uniform) = (0, 0);
        for i in 0..4 {
            let mut posterior: BTreeMap<BitString, BigRational> = BTreeMap::new();
            for (inputs, p) in rows {
                *posterior.entry(inputs[i]).or_insert_with(BigRational::zero) += *p;
            }
            if posterior.len() == 1 {
                determined += 1;
            }
            let first = posterior.values().next().cloned().unwrap_or_else(BigRational::zero);
            if posterior.len() == 1 << ell && posterior.values().all(|p| *p == first) {
                uniform += 1;
            }
        }
        out = out.merge(InputKnowledge { max_determined: determined, min_determined: determined, min_uniform: uniform });
    }
    out
}

fn joint(
    network: &Network,
    corruption: &CorruptionSet,
    ell: usize,
    mut make: impl FnMut() -> Option<Stacked<'static>>,
) -> Result<Distribution<(AdversaryView, Inputs)>> {
    exact_distribution(|rng| {
        let s = random_inputs(ell, rng)?;
        let c = ChoiceBit::random(rng);
        let c_prime = ChoiceBit::random(rng);
        let inst = WeakOtInstance::new(s, c, c_prime)?;
        let mut adversary = make();
        let adv = adversary.as_mut().map(|a| a as &mut dyn Adversary);
        let run = run_weak_ot(&inst, network, corruption, adv, rng)?;
        Ok((run.view, [s[0][0], s[0][1], s[1][0], s[1][1]]))
    })
}

/// Honest Bob on his own, honest intermediaries.
pub fn weak_honest_bob(network: &Network, ell: usize) -> Result<InputKnowledge> {
    let corruption = CorruptionSet::new(&network.topology, [], Controller::Bob)?;
    Ok(knowledge(&joint(network, &corruption, ell, || None)?, ell))
}

/// Bob with `corrupted`, choosing every link-OT input freely in both sessions.
pub fn weak_against_alice(network: &Network, corrupted: &CorruptionSet, ell: usize) -> Result<InputKnowledge> {
    let corruption = corrupted.with_controller(Controller::Bob);
    let n = network.paths.len();
    let mut out: Option<InputKnowledge> = None;
    for d in ChoiceVector::all(n) {
        for d_prime in ChoiceVector::all(n) {
            let j = joint(network, &corruption, ell, || {
                Some(Stacked::new(vec![
                    Box::new(ChoiceVector::for_session(d.clone(), WEAK_SESSION_P1)),
                    Box::new(ChoiceVector::for_session(d_prime.clone(), WEAK_SESSION_P2)),
                ]))
            })?;
            let k = knowledge(&j, ell);
            out = Some(out.map_or(k, |o| o.merge(k)));
        }
    }
    Ok(out.expect("at least one choice vector"))
}

/// How far Alice's side can tell the choices apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceExposure {
    /// Smallest distance between views under `c = 0` and `c = 1`, over `c'`.
    pub c_distance: BigRational,
    /// Largest distance between views under `c' = 0` and `c' = 1`, over `c`.
    pub c_prime_distance: BigRational,
}

pub fn weak_against_bob(network: &Network, corrupted: &CorruptionSet, ell: usize) -> Result<ChoiceExposure> {
    let corruption = corrupted.with_controller(Controller::Alice);
    let views = |c: ChoiceBit, c_prime: ChoiceBit| {
        exact_distribution(|rng| {
            let inst = WeakOtInstance::new(random_inputs(ell, rng)?, c, c_prime)?;
            Ok(run_weak_ot(&inst, network, &corruption, None, rng)?.view)
        })
    };
    let mut table = BTreeMap::new();
    for c in ChoiceBit::both() {
        for c_prime in ChoiceBit::both() {
            table.insert((c, c_prime), views(c, c_prime)?);
        }
    }
    let (zero, one) = (ChoiceBit::ZERO, ChoiceBit::ONE);
    let sd = |a, b| statistical_distance(&table[&a], &table[&b]);
    let c_distance = sd((zero, zero), (one, zero)).min(sd((zero, one), (one, one)));
    let c_prime_distance = sd((zero, zero), (zero, one)).max(sd((one, zero), (one, one)));
    Ok(ChoiceExposure { c_distance, c_prime_distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ratio;
    use crate::netsim::fixtures;

    fn diamond() -> Network {
        let (t, p) = fixtures::diamond().unwrap();
        Network::new(t, p)
    }

    #[test]
    fn honest_bob_learns_two() {
        let k = weak_honest_bob(&diamond(), 1).unwrap();
        assert_eq!((k.min_determined, k.max_determined, k.min_uniform), (2, 2, 2));
    }

    #[test]
    fn all_relays_with_bob() {
        let network = diamond();
        let m = CorruptionSet::new(&network.topology, network.paths.internal_nodes(), Controller::Bob).unwrap();
        let k = weak_against_alice(&network, &m, 1).unwrap();
        assert_eq!(k.max_determined, 3);
        assert!(k.min_uniform >= 1);
    }

    #[test]
    fn all_relays_with_alice() {
        let network = diamond();
        let m = CorruptionSet::new(&network.topology, network.paths.internal_nodes(), Controller::Alice).unwrap();
        let e = weak_against_bob(&network, &m, 1).unwrap();
        assert_eq!(e.c_distance, ratio(1, 1));
        assert!(e.c_prime_distance.is_zero());
    }
}
