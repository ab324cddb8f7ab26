//! Two-candidate XOR combiner: a path-OT and a classical OT, each on masked
//! inputs, so that Bob's choice stays hidden if either the honest path or
//! the hardness of DDH holds.
//!
//! Alice draws `r`, Bob draws `cB` and sets `cA = c + cB`. Candidate A is
//! Protocol 1 on `(s0 + r, s1 + r)` with choice `cA`. Candidate B is the DDH
//! OT on `(r, s0 + s1 + r)` with choice `cB`, its two messages routed along
//! the first path. Bob outputs the XOR of both results.

use crate::bits::{BitString, ChoiceBit};
use crate::classical_ot::{respond, Ciphertext, CyclicGroup, DdhReceiver, OtRequest, OtResponse, PublicKey};
use crate::error::{Error, Result};
use crate::netsim::{
    Adversary, AdversaryView, CorruptionSet, LocalValue, NodeId, NodeProgram, Payload, RoundContext, Simulation,
    Transcript,
};
use crate::protocols::{run_session, Network, PathOtInstance, ProtocolRun, Variant};
use crate::rng::Randomness;

pub const COMBINED_SESSION_A: u32 = 0;
pub const COMBINED_SESSION_B: u32 = 1;

#[derive(Clone, Debug)]
pub struct CombinedRun {
    pub bob_output: BitString,
    pub transcript: Transcript,
    /// Coalition view of both candidates.
    pub view: AdversaryView,
    /// Candidate A alone.
    pub candidate_a: ProtocolRun,
}

impl CombinedRun {
    /// The classical OT request as it crossed the network.
    pub fn request(&self) -> Option<OtRequest> {
        self.transcript.entries.iter().find_map(|e| match e.payload {
            Payload::DdhRequest { public_key, choice } if e.session == COMBINED_SESSION_B => {
                Some(OtRequest { public_key: PublicKey(public_key), choice })
            }
            _ => None,
        })
    }
}

pub fn run_combined(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
    group: &CyclicGroup,
    adversary: Option<&mut dyn Adversary>,
    rng: &mut dyn Randomness,
) -> Result<CombinedRun> {
    let ell = instance.ell();
    let r = BitString::random(ell, rng)?;
    let c_b = ChoiceBit::random(rng);
    let c_a = instance.choice.xor(c_b);

    let inst_a =
        PathOtInstance::new(instance.s0.xor(&r)?, instance.s1.xor(&r)?, c_a, Variant::Protocol1)?;
    let candidate_a = run_session(&inst_a, network, corruption, adversary, COMBINED_SESSION_A, rng)?;

    let route: Vec<NodeId> = network.paths.path(0).to_vec();
    let alice = DdhSender { group: *group, m0: r, m1: instance.s0.xor(&instance.s1)?.xor(&r)?, route: route.clone() };
    let bob = DdhChooser {
        group: *group,
        choice: c_b,
        ell,
        route: route.iter().rev().cloned().collect(),
        receiver: None,
        output: None,
    };
    let outcome = Simulation::new(&network.topology, corruption)
        .session(COMBINED_SESSION_B)
        .program(network.alice(), alice)
        .program(network.bob(), bob)
        .run(rng)?;
    let out_b = *outcome
        .outputs
        .get(network.bob())
        .ok_or_else(|| Error::contract("classical OT finished without an output"))?;

    let mut transcript = candidate_a.transcript.clone();
    transcript.record(COMBINED_SESSION_A, network.alice(), "r", LocalValue::Bits(r));
    transcript.record(COMBINED_SESSION_A, network.bob(), "c", LocalValue::Choice(instance.choice));
    transcript.record(COMBINED_SESSION_A, network.bob(), "cB", LocalValue::Choice(c_b));
    transcript.append(outcome.transcript);
    let bob_output = candidate_a.bob_output.xor(&out_b)?;
    transcript.record(COMBINED_SESSION_B, network.bob(), "combined_output", LocalValue::Bits(bob_output));
    let view = AdversaryView::observe(&transcript, &corruption.coalition(&network.topology));
    Ok(CombinedRun { bob_output, transcript, view, candidate_a })
}

struct DdhSender {
    group: CyclicGroup,
    m0: BitString,
    m1: BitString,
    route: Vec<NodeId>,
}

impl NodeProgram for DdhSender {
    fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        let requests: Vec<OtRequest> = ctx
            .inbox()
            .iter()
            .filter_map(|e| match e.payload {
                Payload::DdhRequest { public_key, choice } => Some(OtRequest { public_key: PublicKey(public_key), choice }),
                _ => None,
            })
            .collect();
        if let Some(request) = requests.first() {
            let OtResponse { z0, z1 } = respond(&self.group, request, &self.m0, &self.m1, ctx.rng())?;
            ctx.send(self.route.clone(), Payload::DdhResponse { z0, z1 });
        }
        Ok(())
    }
}

struct DdhChooser {
    group: CyclicGroup,
    choice: ChoiceBit,
    ell: usize,
    route: Vec<NodeId>,
    receiver: Option<DdhReceiver>,
    output: Option<BitString>,
}

impl NodeProgram for DdhChooser {
    fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
        if ctx.round() == 0 {
            let (receiver, request) = DdhReceiver::start(&self.group, self.choice, ctx.rng());
            self.receiver = Some(receiver);
            ctx.send(
                self.route.clone(),
                Payload::DdhRequest { public_key: request.public_key.0, choice: request.choice },
            );
        }
        let responses: Vec<(Vec<Ciphertext>, Vec<Ciphertext>)> = ctx
            .inbox()
            .iter()
            .filter_map(|e| match &e.payload {
                Payload::DdhResponse { z0, z1 } => Some((z0.clone(), z1.clone())),
                _ => None,
            })
            .collect();
        if let (Some((z0, z1)), Some(receiver), None) = (responses.into_iter().next(), &self.receiver, self.output) {
            let out = receiver.finish(&OtResponse { z0, z1 }, self.ell)?;
            self.output = Some(out);
            ctx.output(out);
        }
        Ok(())
    }

    fn is_done(&self) -> bool {
        self.output.is_some()
    }
}
