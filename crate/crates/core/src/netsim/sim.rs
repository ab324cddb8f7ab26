use std::collections::{BTreeMap, BTreeSet};

use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::linkot::{LinkOt, OtSession};
use crate::netsim::{Channel, CorruptionSet, Envelope, LocalValue, NodeId, Payload, Topology, Transcript, TranscriptEntry};
use crate::rng::Randomness;

pub const DEFAULT_MAX_ROUNDS: usize = 256;

/// Identifies a link-OT invocation within one session.
pub type OtId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Send(Envelope),
    OtSend { ot: OtId, receiver: NodeId, m0: BitString, m1: BitString },
    OtChoose { ot: OtId, sender: NodeId, choice: ChoiceBit },
    Output(BitString),
    Record { label: String, value: LocalValue },
}

/// The result of a link-OT, delivered to its receiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtDelivery {
    pub ot: OtId,
    pub sender: NodeId,
    pub value: BitString,
}

/// What a node sees and does in one round.
pub struct RoundContext<'a> {
    me: NodeId,
    session: u32,
    round: usize,
    inbox: Vec<Envelope>,
    ot_outputs: Vec<OtDelivery>,
    relays: Vec<Envelope>,
    actions: Vec<Action>,
    rng: &'a mut dyn Randomness,
}

impl<'a> RoundContext<'a> {
    pub fn me(&self) -> &NodeId {
        &self.me
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn session(&self) -> u32 {
        self.session
    }

    /// Messages whose final destination is this node.
    pub fn inbox(&self) -> &[Envelope] {
        &self.inbox
    }

    pub fn ot_outputs(&self) -> &[OtDelivery] {
        &self.ot_outputs
    }

    /// Messages passing through. Whatever is left here after the step is
    /// forwarded to its next hop.
    pub fn relays_mut(&mut self) -> &mut Vec<Envelope> {
        &mut self.relays
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn actions_mut(&mut self) -> &mut Vec<Action> {
        &mut self.actions
    }

    pub fn rng(&mut self) -> &mut dyn Randomness {
        &mut *self.rng
    }

    /// Sends along `route`, which must start at this node.
    pub fn send(&mut self, route: Vec<NodeId>, payload: Payload) {
        self.actions.push(Action::Send(Envelope { route, hop: 0, channel: Channel::Link, payload }));
    }

    pub fn send_private(&mut self, to: NodeId, payload: Payload) {
        let route = vec![self.me.clone(), to];
        self.actions.push(Action::Send(Envelope { route, hop: 0, channel: Channel::Private, payload }));
    }

    pub fn ot_send(&mut self, ot: OtId, receiver: NodeId, m0: BitString, m1: BitString) {
        self.actions.push(Action::OtSend { ot, receiver, m0, m1 });
    }

    pub fn ot_choose(&mut self, ot: OtId, sender: NodeId, choice: ChoiceBit) {
        self.actions.push(Action::OtChoose { ot, sender, choice });
    }

    pub fn output(&mut self, value: BitString) {
        self.actions.push(Action::Output(value));
    }

    pub fn record(&mut self, label: &str, value: LocalValue) {
        self.actions.push(Action::Record { label: label.to_string(), value });
    }
}

/// Honest code run by one node.
pub trait NodeProgram {
    fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()>;

    /// Reactive nodes are always done; parties waiting on an output are not.
    fn is_done(&self) -> bool {
        true
    }
}

/// Adversarial control over coalition nodes. Runs right after the node's
/// honest step and may rewrite anything it queued.
pub trait Adversary {
    fn intervene(&mut self, ctx: &mut RoundContext<'_>) -> Result<()>;
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub outputs: BTreeMap<NodeId, BitString>,
    pub transcript: Transcript,
    pub rounds: usize,
}

type OtKey = (OtId, NodeId, NodeId);

/// Synchronous round scheduler. Messages sent in round `k` arrive in round
/// `k + 1`; nodes step in sorted order, so runs are deterministic in the tape.
pub struct Simulation<'a> {
    topology: &'a Topology,
    corruption: &'a CorruptionSet,
    programs: BTreeMap<NodeId, Box<dyn NodeProgram + 'a>>,
    adversary: Option<&'a mut dyn Adversary>,
    link_ot: LinkOt,
    session: u32,
    max_rounds: usize,
}

impl<'a> Simulation<'a> {
    pub fn new(topology: &'a Topology, corruption: &'a CorruptionSet) -> Self {
        Self {
            topology,
            corruption,
            programs: BTreeMap::new(),
            adversary: None,
            link_ot: LinkOt::Ideal,
            session: 0,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    pub fn program(mut self, node: &NodeId, program: impl NodeProgram + 'a) -> Self {
        self.programs.insert(node.clone(), Box::new(program));
        self
    }

    pub fn adversary(mut self, adversary: Option<&'a mut dyn Adversary>) -> Self {
        self.adversary = adversary;
        self
    }

    pub fn link_ot(mut self, link_ot: LinkOt) -> Self {
        self.link_ot = link_ot;
        self
    }

    pub fn session(mut self, session: u32) -> Self {
        self.session = session;
        self
    }

    pub fn max_rounds(mut self, max_rounds: usize) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn run(mut self, rng: &mut dyn Randomness) -> Result<SimOutcome> {
        for node in self.programs.keys() {
            if !self.topology.contains(node) {
                return Err(Error::InvalidTopology(format!("program installed on unknown node {node}")));
            }
        }
        let coalition = self.corruption.coalition(self.topology);
        let nodes: Vec<NodeId> = self.topology.nodes().cloned().collect();
        let mut transcript = Transcript::default();
        let mut outputs = BTreeMap::new();
        let mut in_flight: Vec<Envelope> = Vec::new();
        let mut ot_in_flight: Vec<(NodeId, OtDelivery)> = Vec::new();
        let mut pending_send: BTreeMap<OtKey, (BitString, BitString)> = BTreeMap::new();
        let mut pending_choose: BTreeMap<OtKey, ChoiceBit> = BTreeMap::new();
        let mut closed: BTreeSet<OtKey> = BTreeSet::new();

        for round in 0..self.max_rounds {
            let mut inboxes: BTreeMap<NodeId, (Vec<Envelope>, Vec<Envelope>)> = BTreeMap::new();
            for env in in_flight.drain(..) {
                let slot = inboxes.entry(env.holder().clone()).or_default();
                if env.next_hop().is_none() {
                    slot.0.push(env);
                } else {
                    slot.1.push(env);
                }
            }
            let mut ot_boxes: BTreeMap<NodeId, Vec<OtDelivery>> = BTreeMap::new();
            for (to, d) in ot_in_flight.drain(..) {
                ot_boxes.entry(to).or_default().push(d);
            }

            let mut next_flight = Vec::new();
            for node in &nodes {
                let (inbox, relays) = inboxes.remove(node).unwrap_or_default();
                let mut ctx = RoundContext {
                    me: node.clone(),
                    session: self.session,
                    round,
                    inbox,
                    ot_outputs: ot_boxes.remove(node).unwrap_or_default(),
                    relays,
                    actions: Vec::new(),
                    rng: &mut *rng,
                };
                if let Some(program) = self.programs.get_mut(node) {
                    program.step(&mut ctx)?;
                }
                if coalition.contains(node) {
                    if let Some(adversary) = self.adversary.as_deref_mut() {
                        adversary.intervene(&mut ctx)?;
                    }
                }
                let RoundContext { relays, mut actions, .. } = ctx;
                // forwarding happens after the node's own sends
                actions.extend(relays.into_iter().map(Action::Send));
                for action in actions {
                    match action {
                        Action::Send(env) => {
                            let entry = self.validate_hop(node, &env, round, &coalition)?;
                            transcript.entries.push(entry);
                            next_flight.push(Envelope { hop: env.hop + 1, ..env });
                        }
                        Action::OtSend { ot, receiver, m0, m1 } => {
                            self.check_link(node, &receiver)?;
                            if m0.len() != m1.len() {
                                return Err(Error::LengthMismatch { left: m0.len(), right: m1.len() });
                            }
                            let key = (ot, node.clone(), receiver);
                            if !closed.contains(&key) {
                                pending_send.entry(key).or_insert((m0, m1));
                            }
                        }
                        Action::OtChoose { ot, sender, choice } => {
                            self.check_link(node, &sender)?;
                            let key = (ot, sender, node.clone());
                            if !closed.contains(&key) {
                                pending_choose.entry(key).or_insert(choice);
                            }
                        }
                        Action::Output(v) => {
                            outputs.insert(node.clone(), v);
                        }
                        Action::Record { label, value } => {
                            transcript.record(self.session, node, &label, value);
                        }
                    }
                }
            }

            let ready: Vec<OtKey> = pending_send.keys().filter(|k| pending_choose.contains_key(*k)).cloned().collect();
            for key in ready {
                let (m0, m1) = pending_send.remove(&key).expect("present");
                let choice = pending_choose.remove(&key).expect("present");
                let received = self.link_ot.transfer(&m0, &m1, choice, rng)?;
                let (ot, sender, receiver) = key.clone();
                transcript.ot_sessions.push(OtSession {
                    session: self.session,
                    round,
                    ot,
                    sender: sender.clone(),
                    receiver: receiver.clone(),
                    m0,
                    m1,
                    choice,
                    received,
                });
                ot_in_flight.push((receiver, OtDelivery { ot, sender, value: received }));
                closed.insert(key);
            }

            in_flight = next_flight;
            if in_flight.is_empty() && ot_in_flight.is_empty() {
                let waiting: Vec<String> =
                    self.programs.iter().filter(|(_, p)| !p.is_done()).map(|(n, _)| n.to_string()).collect();
                if waiting.is_empty() {
                    return Ok(SimOutcome { outputs, transcript, rounds: round + 1 });
                }
                return Err(Error::Deadlock {
                    round,
                    reason: format!("nothing in flight while waiting on {}", waiting.join(", ")),
                });
            }
        }
        Err(Error::Deadlock { round: self.max_rounds, reason: "round bound reached".into() })
    }

    fn check_link(&self, a: &NodeId, b: &NodeId) -> Result<()> {
        if self.topology.has_edge(a, b) {
            Ok(())
        } else {
            Err(Error::NotALink { a: a.to_string(), b: b.to_string() })
        }
    }

    fn validate_hop(
        &self,
        node: &NodeId,
        env: &Envelope,
        round: usize,
        coalition: &BTreeSet<NodeId>,
    ) -> Result<TranscriptEntry> {
        if env.route.get(env.hop) != Some(node) {
            return Err(Error::contract(format!("{node} sent a message it does not hold")));
        }
        let next = env
            .next_hop()
            .ok_or_else(|| Error::contract(format!("{node} sent a message with no next hop")))?;
        match env.channel {
            Channel::Link => self.check_link(node, next)?,
            Channel::Private => {
                if env.route.len() != 2 || !self.topology.contains(next) {
                    return Err(Error::contract("private messages go directly to a known node"));
                }
            }
        }
        Ok(TranscriptEntry {
            session: self.session,
            round,
            sender: node.clone(),
            receiver: next.clone(),
            destination: env.destination().clone(),
            channel: env.channel,
            payload: env.payload.clone(),
            link_private: !coalition.contains(node) && !coalition.contains(next),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{AdversaryView, Controller};
    use crate::rng::SeededRng;

    struct EchoSource {
        route: Vec<NodeId>,
        value: BitString,
    }

    impl NodeProgram for EchoSource {
        fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
            if ctx.round() == 0 {
                ctx.send(self.route.clone(), Payload::Data { value: self.value });
            }
            Ok(())
        }
    }

    #[derive(Default)]
    struct Sink {
        got: Option<BitString>,
    }

    impl NodeProgram for Sink {
        fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
            for env in ctx.inbox() {
                if let Payload::Data { value } = env.payload {
                    self.got = Some(value);
                }
            }
            if let Some(v) = self.got {
                ctx.output(v);
            }
            Ok(())
        }

        fn is_done(&self) -> bool {
            self.got.is_some()
        }
    }

    fn line() -> Topology {
        Topology::from_names(&["a", "v", "b"], &[("a", "v"), ("v", "b")], "a", "b").unwrap()
    }

    fn echo(topology: &Topology, corruption: &CorruptionSet, seed: u64) -> SimOutcome {
        let route: Vec<NodeId> = ["a", "v", "b"].iter().map(|&n| NodeId::new(n)).collect();
        let value: BitString = "101".parse().unwrap();
        Simulation::new(topology, corruption)
            .program(&NodeId::new("a"), EchoSource { route, value })
            .program(&NodeId::new("b"), Sink::default())
            .run(&mut SeededRng::new(seed))
            .unwrap()
    }

    #[test]
    fn echo_reaches_bob_unobserved() {
        let t = line();
        let c = CorruptionSet::honest(&t);
        let out = echo(&t, &c, 1);
        assert_eq!(out.outputs[&NodeId::new("b")].to_string(), "101");
        assert_eq!(out.transcript.entries.len(), 2);
        assert!(out.transcript.entries.iter().all(|e| e.link_private));
        assert!(AdversaryView::observe(&out.transcript, &c.coalition(&t)).is_empty());
    }

    #[test]
    fn corrupt_relay_sees_both_hops() {
        let t = line();
        let c = CorruptionSet::from_names(&t, &["v"], Controller::Independent).unwrap();
        let out = echo(&t, &c, 1);
        let view = AdversaryView::observe(&out.transcript, &c.coalition(&t));
        assert_eq!(view.entries.len(), 2);
        assert_eq!(view.entries[0].round, 0);
        assert_eq!(view.entries[1].round, 1);
        assert!(view.entries.iter().all(|e| !e.link_private));
    }

    #[test]
    fn replay_is_identical() {
        let t = line();
        let c = CorruptionSet::from_names(&t, &["v"], Controller::Independent).unwrap();
        let a = serde_json::to_string(&echo(&t, &c, 5).transcript).unwrap();
        let b = serde_json::to_string(&echo(&t, &c, 5).transcript).unwrap();
        assert_eq!(a, b);
    }

    struct Dropper;

    impl Adversary for Dropper {
        fn intervene(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
            ctx.relays_mut().clear();
            Ok(())
        }
    }

    #[test]
    fn dropped_message_deadlocks() {
        let t = line();
        let c = CorruptionSet::from_names(&t, &["v"], Controller::Independent).unwrap();
        let route: Vec<NodeId> = ["a", "v", "b"].iter().map(|&n| NodeId::new(n)).collect();
        let mut dropper = Dropper;
        let err = Simulation::new(&t, &c)
            .program(&NodeId::new("a"), EchoSource { route, value: "1".parse().unwrap() })
            .program(&NodeId::new("b"), Sink::default())
            .adversary(Some(&mut dropper))
            .run(&mut SeededRng::new(0))
            .unwrap_err();
        assert!(matches!(err, Error::Deadlock { .. }));
    }

    #[test]
    fn sending_over_a_missing_link_fails() {
        let t = line();
        let c = CorruptionSet::honest(&t);
        let route = vec![NodeId::new("a"), NodeId::new("b")];
        let err = Simulation::new(&t, &c)
            .program(&NodeId::new("a"), EchoSource { route, value: "1".parse().unwrap() })
            .run(&mut SeededRng::new(0))
            .unwrap_err();
        assert!(matches!(err, Error::NotALink { .. }));
    }

    #[test]
    fn round_bound_reports_deadlock() {
        struct Chatter;
        impl NodeProgram for Chatter {
            fn step(&mut self, ctx: &mut RoundContext<'_>) -> Result<()> {
                ctx.send(vec![NodeId::new("a"), NodeId::new("v")], Payload::Data { value: "1".parse().unwrap() });
                Ok(())
            }
        }
        let t = line();
        let c = CorruptionSet::honest(&t);
        let err = Simulation::new(&t, &c)
            .program(&NodeId::new("a"), Chatter)
            .max_rounds(8)
            .run(&mut SeededRng::new(0))
            .unwrap_err();
        assert!(matches!(err, Error::Deadlock { round: 8, .. }));
    }
}
