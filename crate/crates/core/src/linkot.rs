//! Link-OT: 1-out-of-2 string OT between adjacent nodes.
//!
//! The default realization is an ideal functionality. A coalition holding
//! the sender learns the sender's inputs and nothing else; a coalition
//! holding the receiver learns the choice and `m_choice`, never
//! `m_{1-choice}`.

use std::collections::BTreeSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bits::{BitString, ChoiceBit};
use crate::classical_ot::{run_ddh_ot, CyclicGroup};
use crate::error::{Error, Result};
use crate::netsim::{NodeId, OtId, Topology};
use crate::rng::Randomness;

/// How link-OT sessions are carried out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinkOt {
    /// Trusted functionality. All security metrics assume this.
    #[default]
    Ideal,
    /// Classical DDH-based OT between the two endpoints.
    Ddh(CyclicGroup),
}

impl LinkOt {
    pub fn transfer(
        &self,
        m0: &BitString,
        m1: &BitString,
        choice: ChoiceBit,
        rng: &mut dyn Randomness,
    ) -> Result<BitString> {
        match self {
            LinkOt::Ideal => {
                if m0.len() != m1.len() {
                    return Err(Error::LengthMismatch { left: m0.len(), right: m1.len() });
                }
                Ok(if choice.value() { *m1 } else { *m0 })
            }
            LinkOt::Ddh(group) => run_ddh_ot(m0, m1, choice, group, rng),
        }
    }
}

/// Record of one link-OT invocation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OtSession {
    pub session: u32,
    pub round: usize,
    pub ot: OtId,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub m0: BitString,
    pub m1: BitString,
    pub choice: ChoiceBit,
    pub received: BitString,
}

impl OtSession {
    /// What a coalition learns from this session.
    pub fn leaks(&self, coalition: &BTreeSet<NodeId>) -> Vec<OtLeak> {
        let mut out = Vec::new();
        if coalition.contains(&self.sender) {
            out.push(OtLeak::Sender {
                session: self.session,
                ot: self.ot,
                sender: self.sender.clone(),
                receiver: self.receiver.clone(),
                m0: self.m0,
                m1: self.m1,
            });
        }
        if coalition.contains(&self.receiver) {
            out.push(OtLeak::Receiver {
                session: self.session,
                ot: self.ot,
                sender: self.sender.clone(),
                receiver: self.receiver.clone(),
                choice: self.choice,
                received: self.received,
            });
        }
        out
    }
}

impl Serialize for OtSession {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("OtSession", 10)?;
        s.serialize_field("session", &self.session)?;
        s.serialize_field("round", &self.round)?;
        s.serialize_field("ot", &self.ot)?;
        s.serialize_field("sender", &self.sender)?;
        s.serialize_field("receiver", &self.receiver)?;
        s.serialize_field("inputs", &(self.m0, self.m1))?;
        s.serialize_field("choice", &self.choice)?;
        s.serialize_field("choice_visible_to", &[&self.receiver])?;
        s.serialize_field("inputs_visible_to", &[&self.sender])?;
        s.serialize_field("received", &self.received)?;
        s.end()
    }
}

/// A coalition's share of a link-OT session.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "side", rename_all = "lowercase")]
pub enum OtLeak {
    Sender { session: u32, ot: OtId, sender: NodeId, receiver: NodeId, m0: BitString, m1: BitString },
    Receiver { session: u32, ot: OtId, sender: NodeId, receiver: NodeId, choice: ChoiceBit, received: BitString },
}

/// One ideal link-OT between adjacent nodes.
pub fn ideal_ot(
    topology: &Topology,
    sender: &NodeId,
    receiver: &NodeId,
    inputs: (BitString, BitString),
    choice: ChoiceBit,
) -> Result<OtSession> {
    if !topology.has_edge(sender, receiver) {
        return Err(Error::NotALink { a: sender.to_string(), b: receiver.to_string() });
    }
    let (m0, m1) = inputs;
    let received = LinkOt::Ideal.transfer(&m0, &m1, choice, &mut NoRandomness)?;
    Ok(OtSession { session: 0, round: 0, ot: 0, sender: sender.clone(), receiver: receiver.clone(), m0, m1, choice, received })
}

struct NoRandomness;

impl Randomness for NoRandomness {
    fn below(&mut self, _n: u64) -> u64 {
        unreachable!("the ideal functionality draws no randomness")
    }
}
