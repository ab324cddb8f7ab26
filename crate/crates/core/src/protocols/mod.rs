//! The path-OT protocols, run over the simulated network.

mod combined;
mod path_ot;
mod tamper;
mod weak;

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::linkot::LinkOt;
use crate::netsim::{Adversary, AdversaryView, CorruptionSet, NodeId, PathSet, Simulation, Topology, Transcript};
use crate::rng::Randomness;

pub use combined::{run_combined, CombinedRun, COMBINED_SESSION_A, COMBINED_SESSION_B};
pub use tamper::{check_opened, choose_opened, rebase, tamper_check_run, test_run, test_runs, TamperConfig, TamperOutcome, TestRun};
pub use weak::{run_weak_ot, WeakOtInstance, WeakOtRun, WEAK_SESSION_P1, WEAK_SESSION_P2};

use path_ot::{AliceProgram, BobProgram, IntermediaryProgram, Layout};

/// A topology together with the chosen paths and the link-OT realization.
#[derive(Clone, Debug)]
pub struct Network {
    pub topology: Topology,
    pub paths: PathSet,
    pub link_ot: LinkOt,
}

impl Network {
    pub fn new(topology: Topology, paths: PathSet) -> Self {
        Self { topology, paths, link_ot: LinkOt::Ideal }
    }

    pub fn with_link_ot(mut self, link_ot: LinkOt) -> Self {
        self.link_ot = link_ot;
        self
    }

    pub fn alice(&self) -> &NodeId {
        self.topology.alice()
    }

    pub fn bob(&self) -> &NodeId {
        self.topology.bob()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "p1")]
    Protocol1,
    #[serde(rename = "p2")]
    Protocol2,
    #[serde(rename = "hybrid1")]
    Hybrid1,
    #[serde(rename = "hybrid2")]
    Hybrid2,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Protocol1, Variant::Protocol2, Variant::Hybrid1, Variant::Hybrid2];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Protocol1 => "p1",
            Variant::Protocol2 => "p2",
            Variant::Hybrid1 => "hybrid1",
            Variant::Hybrid2 => "hybrid2",
        }
    }

    /// Bob secret-shares his choice (otherwise Alice shares her inputs).
    pub fn shares_choice(self) -> bool {
        matches!(self, Variant::Protocol1 | Variant::Hybrid1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathOtInstance {
    pub s0: BitString,
    pub s1: BitString,
    pub choice: ChoiceBit,
    pub variant: Variant,
}

impl PathOtInstance {
    pub fn new(s0: BitString, s1: BitString, choice: ChoiceBit, variant: Variant) -> Result<Self> {
        if s0.len() != s1.len() {
            return Err(Error::LengthMismatch { left: s0.len(), right: s1.len() });
        }
        Ok(Self { s0, s1, choice, variant })
    }

    pub fn ell(&self) -> usize {
        self.s0.len()
    }

    /// `s_c`.
    pub fn expected(&self) -> BitString {
        if self.choice.value() {
            self.s1
        } else {
            self.s0
        }
    }
}

/// Outcome of one execution.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub bob_output: BitString,
    pub transcript: Transcript,
    pub view: AdversaryView,
    pub rounds: usize,
}

pub fn run_protocol1(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    rng: &mut dyn Randomness,
) -> Result<ProtocolRun> {
    expect_variant(instance, &[Variant::Protocol1])?;
    run_path_ot(instance, network, corruption, None, rng)
}

pub fn run_protocol2(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    rng: &mut dyn Randomness,
) -> Result<ProtocolRun> {
    expect_variant(instance, &[Variant::Protocol2])?;
    run_path_ot(instance, network, corruption, None, rng)
}

/// Either private-channel variant.
pub fn run_hybrid(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    rng: &mut dyn Randomness,
) -> Result<ProtocolRun> {
    expect_variant(instance, &[Variant::Hybrid1, Variant::Hybrid2])?;
    run_path_ot(instance, network, corruption, None, rng)
}

/// Any variant, with corrupted nodes optionally running `adversary`.
pub fn run_path_ot(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    adversary: Option<&mut dyn Adversary>,
    rng: &mut dyn Randomness,
) -> Result<ProtocolRun> {
    run_session(instance, network, corruption, adversary, 0, rng)
}

pub(crate) fn run_session(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    adversary: Option<&mut dyn Adversary>,
    session: u32,
    rng: &mut dyn Randomness,
) -> Result<ProtocolRun> {
    let PathOtInstance { s0, s1, choice, variant } = *instance;
    if s0.len() != s1.len() {
        return Err(Error::LengthMismatch { left: s0.len(), right: s1.len() });
    }
    if network.paths.is_empty() {
        return Err(Error::contract("at least one path is required"));
    }
    let layout = Rc::new(Layout {
        paths: network.paths.clone(),
        alice: network.alice().clone(),
        bob: network.bob().clone(),
        ell: s0.len(),
        variant,
    });
    let mut sim = Simulation::new(&network.topology, corruption)
        .link_ot(network.link_ot)
        .session(session)
        .adversary(adversary.map(|a| a as &mut dyn Adversary))
        .program(network.alice(), AliceProgram::new(Rc::clone(&layout), s0, s1))
        .program(network.bob(), BobProgram::new(Rc::clone(&layout), choice));
    for node in network.paths.internal_nodes() {
        sim = sim.program(&node, IntermediaryProgram::new(Rc::clone(&layout)));
    }
    let outcome = sim.run(rng)?;
    let bob_output = *outcome
        .outputs
        .get(network.bob())
        .ok_or_else(|| Error::contract("Bob finished without an output"))?;
    let view = AdversaryView::observe(&outcome.transcript, &corruption.coalition(&network.topology));
    Ok(ProtocolRun { bob_output, transcript: outcome.transcript, view, rounds: outcome.rounds })
}

fn expect_variant(instance: &PathOtInstance, allowed: &[Variant]) -> Result<()> {
    if allowed.contains(&instance.variant) {
        Ok(())
    } else {
        Err(Error::contract(format!("variant {} not accepted here", instance.variant.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{fixtures, Controller, Payload};
    use crate::rng::{enumerate_tapes, SeededRng, ENUMERATION_BOUND};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn net(n: usize) -> Network {
        let (t, p) = fixtures::with_paths(n).unwrap();
        Network::new(t, p)
    }

    fn honest(run: impl Fn(&PathOtInstance, &Network, &CorruptionSet, &mut dyn Randomness) -> Result<ProtocolRun>,
              inst: PathOtInstance, n: usize) -> BitString {
        let network = net(n);
        let corruption = CorruptionSet::honest(&network.topology);
        run(&inst, &network, &corruption, &mut SeededRng::new(7)).unwrap().bob_output
    }

    #[test]
    fn protocol1_examples() {
        let i = PathOtInstance::new(bs("0"), bs("1"), ChoiceBit::ONE, Variant::Protocol1).unwrap();
        assert_eq!(honest(run_protocol1, i, 2), bs("1"));
        let i = PathOtInstance::new(bs("101"), bs("110"), ChoiceBit::ZERO, Variant::Protocol1).unwrap();
        for n in 1..=3 {
            assert_eq!(honest(run_protocol1, i, n), bs("101"));
        }
    }

    #[test]
    fn protocol2_example() {
        let i = PathOtInstance::new(bs("1"), bs("0"), ChoiceBit::ZERO, Variant::Protocol2).unwrap();
        assert_eq!(honest(run_protocol2, i, 2), bs("1"));
    }

    #[test]
    fn wrong_variant_rejected() {
        let i = PathOtInstance::new(bs("1"), bs("0"), ChoiceBit::ZERO, Variant::Protocol2).unwrap();
        let network = net(1);
        let c = CorruptionSet::honest(&network.topology);
        assert!(run_protocol1(&i, &network, &c, &mut SeededRng::new(1)).is_err());
    }

    #[test]
    fn every_variant_correct_over_all_tapes() {
        for variant in Variant::ALL {
            for n in 1..=3 {
                let network = net(n);
                let corruption = CorruptionSet::honest(&network.topology);
                for s0 in BitString::all(2).unwrap() {
                    for s1 in BitString::all(2).unwrap() {
                        for c in ChoiceBit::both() {
                            let inst = PathOtInstance::new(s0, s1, c, variant).unwrap();
                            let outs = enumerate_tapes(ENUMERATION_BOUND, |rng| {
                                run_path_ot(&inst, &network, &corruption, None, rng).map(|r| r.bob_output)
                            })
                            .unwrap();
                            assert!(outs.iter().all(|(o, _)| *o == inst.expected()), "{variant:?} n={n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn direct_link_path() {
        let t = crate::netsim::Topology::from_names(&["a", "b"], &[("a", "b")], "a", "b").unwrap();
        let p = PathSet::from_names(&t, &[&["a", "b"]]).unwrap();
        let network = Network::new(t, p);
        let c = CorruptionSet::honest(&network.topology);
        for variant in Variant::ALL {
            let i = PathOtInstance::new(bs("10"), bs("01"), ChoiceBit::ONE, variant).unwrap();
            assert_eq!(run_path_ot(&i, &network, &c, None, &mut SeededRng::new(3)).unwrap().bob_output, bs("01"));
        }
    }

    #[test]
    fn relay_on_path_sees_choice_share() {
        let network = net(1);
        let corruption = CorruptionSet::from_names(&network.topology, &["v"], Controller::Alice).unwrap();
        let i = PathOtInstance::new(bs("1"), bs("0"), ChoiceBit::ONE, Variant::Protocol1).unwrap();
        let run = run_protocol1(&i, &network, &corruption, &mut SeededRng::new(1)).unwrap();
        assert!(run.view.payloads().any(|p| matches!(p, Payload::ChoiceShare { share, .. } if *share == ChoiceBit::ONE)));
    }

    #[test]
    fn hybrid1_keeps_shares_off_the_path() {
        let t = crate::netsim::Topology::from_names(
            &["a", "v", "x", "b"],
            &[("a", "v"), ("v", "x"), ("x", "b")],
            "a",
            "b",
        )
        .unwrap();
        let p = PathSet::from_names(&t, &[&["a", "v", "x", "b"]]).unwrap();
        let network = Network::new(t, p);
        let corruption = CorruptionSet::from_names(&network.topology, &["x"], Controller::Alice).unwrap();
        let i = PathOtInstance::new(bs("1"), bs("0"), ChoiceBit::ONE, Variant::Hybrid1).unwrap();
        let run = run_hybrid(&i, &network, &corruption, &mut SeededRng::new(1)).unwrap();
        assert_eq!(run.bob_output, bs("0"));
        assert!(!run.view.payloads().any(|p| matches!(p, Payload::ChoiceShare { .. })));
    }
}
