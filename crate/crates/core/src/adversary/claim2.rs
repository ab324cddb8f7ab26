//! The attack showing an honest path is necessary.
//!
//! Alice runs honestly on uniform `s0, s1`, picks `b` uniformly and asks the
//! separating set `M` for its best guess of `s_b`. She outputs `b` if the
//! guess is right and `1 - b` otherwise. When `M` knows `s_c` but not
//! `s_{1-c}`, this recovers `c` with probability `1 - 2^-(ell+1)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::analysis::{exact_distribution, inverse_power_of_two, monte_carlo, ratio, Distribution, Estimate};
use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::netsim::{AdversaryView, Controller, CorruptionSet};
use crate::protocols::{run_path_ot, Network, PathOtInstance, Variant};
use crate::rng::Randomness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim2Outcome {
    pub ell: usize,
    /// Probability that Alice's output equals `c`.
    pub success: BigRational,
    /// Probability that `M`'s guess of the unchosen input `s_{1-c}` is right.
    pub unchosen_guess: BigRational,
}

impl Claim2Outcome {
    /// Lower bound on the receiver-side epsilon implied by `success`.
    pub fn receiver_epsilon_bound(&self) -> BigRational {
        (self.success.clone() - ratio(1, 2)).max(BigRational::zero())
    }

    /// Lower bound on the sender-side epsilon: `M` plus Bob knows `s_c` and
    /// guesses `s_{1-c}` this well.
    pub fn sender_epsilon_bound(&self) -> BigRational {
        (self.unchosen_guess.clone() - inverse_power_of_two(self.ell)).max(BigRational::zero())
    }

    /// `1 - 2^-(ell+1)`.
    pub fn target(ell: usize) -> BigRational {
        BigRational::from_integer(1.into()) - inverse_power_of_two(ell + 1)
    }

    /// The smallest epsilon any protocol can have against this attack:
    /// `1/4 - 2^-(ell+2)`.
    pub fn epsilon_floor(ell: usize) -> BigRational {
        ratio(1, 4) - inverse_power_of_two(ell + 2)
    }
}

type Sample = (AdversaryView, BitString, BitString, ChoiceBit);

/// `M`'s best guess of `s0` and of `s1` for each view it can see.
#[derive(Clone, Debug, Default)]
pub struct GuessTable {
    guesses: BTreeMap<AdversaryView, [BitString; 2]>,
    ell: usize,
}

impl GuessTable {
    /// Maximum-likelihood guesses under uniform inputs, choice and tape;
    /// ties go to the smallest string.
    pub fn from_joint(joint: &Distribution<Sample>, ell: usize) -> Result<Self> {
        let mut mass: BTreeMap<(&AdversaryView, usize, BitString), BigRational> = BTreeMap::new();
        for ((view, s0, s1, _), p) in joint.iter() {
            for (b, s) in [s0, s1].into_iter().enumerate() {
                *mass.entry((view, b, *s)).or_insert_with(BigRational::zero) += p;
            }
        }
        let mut best: BTreeMap<(&AdversaryView, usize), (BitString, BigRational)> = BTreeMap::new();
        for ((view, b, s), p) in mass {
            match best.get(&(view, b)) {
                Some((_, q)) if *q >= p => {}
                _ => {
                    best.insert((view, b), (s, p));
                }
            }
        }
        let zero = BitString::zeros(ell)?;
        let mut guesses: BTreeMap<AdversaryView, [BitString; 2]> = BTreeMap::new();
        for ((view, b), (s, _)) in best {
            guesses.entry(view.clone()).or_insert([zero, zero])[b] = s;
        }
        Ok(Self { guesses, ell })
    }

    pub fn guess(&self, view: &AdversaryView, b: ChoiceBit) -> BitString {
        match self.guesses.get(view) {
            Some(g) => g[b.as_index()],
            None => BitString::zeros(self.ell).expect("valid length"),
        }
    }

    /// Alice's output for her coin `b`.
    pub fn alice_output(&self, view: &AdversaryView, b: ChoiceBit, s0: BitString, s1: BitString) -> ChoiceBit {
        let truth = if b.value() { s1 } else { s0 };
        if self.guess(view, b) == truth {
            b
        } else {
            b.flipped()
        }
    }
}

fn sample(
    variant: Variant,
    network: &Network,
    corruption: &CorruptionSet,
    ell: usize,
    rng: &mut dyn Randomness,
) -> Result<Sample> {
    let s0 = BitString::random(ell, rng)?;
    let s1 = BitString::random(ell, rng)?;
    let c = ChoiceBit::random(rng);
    let inst = PathOtInstance::new(s0, s1, c, variant)?;
    let run = run_path_ot(&inst, network, corruption, None, rng)?;
    Ok((AdversaryView::observe(&run.transcript, corruption.corrupted()), s0, s1, c))
}

fn attack_setup(network: &Network, m: &CorruptionSet, checked: bool) -> Result<CorruptionSet> {
    if checked && !network.topology.separates(m.corrupted()) {
        return Err(Error::NotSeparating);
    }
    Ok(m.with_controller(Controller::Alice))
}

/// Exact success of the attack. `M` must separate Alice from Bob.
pub fn claim2_attack(variant: Variant, network: &Network, m: &CorruptionSet, ell: usize) -> Result<Claim2Outcome> {
    let corruption = attack_setup(network, m, true)?;
    exact_outcome(variant, network, &corruption, ell)
}

/// The same strategy on any corruption set.
pub fn claim2_attack_unchecked(
    variant: Variant,
    network: &Network,
    m: &CorruptionSet,
    ell: usize,
) -> Result<Claim2Outcome> {
    let corruption = attack_setup(network, m, false)?;
    exact_outcome(variant, network, &corruption, ell)
}

/// Exact view joint and the resulting guess table.
pub fn claim2_guess_table(
    variant: Variant,
    network: &Network,
    m: &CorruptionSet,
    ell: usize,
) -> Result<(Distribution<Sample>, GuessTable)> {
    let corruption = m.with_controller(Controller::Alice);
    let joint = exact_distribution(|rng| sample(variant, network, &corruption, ell, rng))?;
    let table = GuessTable::from_joint(&joint, ell)?;
    Ok((joint, table))
}

fn exact_outcome(variant: Variant, network: &Network, corruption: &CorruptionSet, ell: usize) -> Result<Claim2Outcome> {
    let (joint, table) = claim2_guess_table(variant, network, corruption, ell)?;
    let half = ratio(1, 2);
    let mut success = BigRational::zero();
    let mut unchosen_guess = BigRational::zero();
    for ((view, s0, s1, c), p) in joint.iter() {
        for b in ChoiceBit::both() {
            if table.alice_output(view, b, *s0, *s1) == *c {
                success += p * &half;
            }
        }
        let other = c.flipped();
        let truth = if other.value() { *s1 } else { *s0 };
        if table.guess(view, other) == truth {
            unchosen_guess += p.clone();
        }
    }
    Ok(Claim2Outcome { ell, success, unchosen_guess })
}

/// Sampled success frequency; `M`'s guesses come from the exact table.
pub fn claim2_monte_carlo(
    variant: Variant,
    network: &Network,
    m: &CorruptionSet,
    ell: usize,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let corruption = attack_setup(network, m, true)?;
    let (_, table) = claim2_guess_table(variant, network, &corruption, ell)?;
    monte_carlo(trials, seed, |rng| {
        let (view, s0, s1, c) = sample(variant, network, &corruption, ell, rng)?;
        let b = ChoiceBit::random(rng);
        Ok(table.alice_output(&view, b, s0, s1) == c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::fixtures;

    fn network(n: usize) -> Network {
        let (t, p) = fixtures::with_paths(n).unwrap();
        Network::new(t, p)
    }

    #[test]
    fn line_attack_hits_the_bound() {
        let net = network(1);
        let m = CorruptionSet::from_names(&net.topology, &["v"], Controller::Alice).unwrap();
        for ell in 1..=2 {
            let o = claim2_attack(Variant::Protocol1, &net, &m, ell).unwrap();
            assert_eq!(o.success, Claim2Outcome::target(ell));
            assert_eq!(o.unchosen_guess, inverse_power_of_two(ell));
            assert!(o.receiver_epsilon_bound() >= Claim2Outcome::epsilon_floor(ell));
        }
    }

    #[test]
    fn non_separating_set_rejected_and_useless() {
        let net = network(2);
        let m = CorruptionSet::from_names(&net.topology, &["v2"], Controller::Alice).unwrap();
        assert!(matches!(claim2_attack(Variant::Protocol1, &net, &m, 1), Err(Error::NotSeparating)));
        let o = claim2_attack_unchecked(Variant::Protocol1, &net, &m, 1).unwrap();
        assert_eq!(o.success, ratio(1, 2));
    }

    #[test]
    fn protocol2_leaks_the_other_input_instead() {
        let net = network(1);
        let m = CorruptionSet::from_names(&net.topology, &["v"], Controller::Alice).unwrap();
        let o = claim2_attack(Variant::Protocol2, &net, &m, 1).unwrap();
        assert_eq!(o.success, ratio(1, 2));
        assert_eq!(o.unchosen_guess, ratio(1, 1));
        assert_eq!(o.sender_epsilon_bound(), ratio(1, 2));
    }

    #[test]
    fn monte_carlo_agrees() {
        let net = network(1);
        let m = CorruptionSet::from_names(&net.topology, &["v"], Controller::Alice).unwrap();
        let e = claim2_monte_carlo(Variant::Protocol1, &net, &m, 1, 2000, 1).unwrap();
        assert!((e.frequency - 0.75).abs() < 0.05, "{e:?}");
    }
}
