//! Path-OT as a two-party protocol.
//!
//! The paths are split between Anne and Bill. Anne plays Alice and every
//! intermediary on her paths, Bill plays Bob and every intermediary on his.
//! What crosses between the two halves becomes traffic on the single link
//! `anne - bill`, so a path-OT secure against one dishonest half would be a
//! two-party OT from nothing but that link.

use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::Serialize;

use crate::analysis::{epsilon_receiver, epsilon_sender, SenderSecurity};
use crate::bits::{BitString, ChoiceBit};
use crate::error::{Error, Result};
use crate::linkot::OtSession;
use crate::netsim::{Adversary, AdversaryView, Controller, CorruptionSet, NodeId, Payload, Topology};
use crate::protocols::{run_path_ot, Network, PathOtInstance, Variant};
use crate::rng::Randomness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Anne,
    Bill,
}

impl Side {
    pub fn node(self) -> NodeId {
        match self {
            Side::Anne => NodeId::new("anne"),
            Side::Bill => NodeId::new("bill"),
        }
    }
}

/// A message or link-OT crossing between the halves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Crossing {
    Message { round: usize, from: Side, to: Side, payload: Payload },
    LinkOt { round: usize, sender: Side, receiver: Side, m0: BitString, m1: BitString, choice: ChoiceBit },
}

#[derive(Clone, Debug)]
pub struct TwoPartyRun {
    pub output: BitString,
    /// Everything that crossed the `anne - bill` link.
    pub crossings: Vec<Crossing>,
    pub view: AdversaryView,
}

#[derive(Clone, Debug)]
pub struct TwoPartyOt {
    variant: Variant,
    network: Network,
    anne: BTreeSet<NodeId>,
    bill: BTreeSet<NodeId>,
    topology: Topology,
}

pub fn anne_bill_reduction(
    variant: Variant,
    network: &Network,
    anne_paths: &[usize],
    bill_paths: &[usize],
) -> Result<TwoPartyOt> {
    if anne_paths.is_empty() || bill_paths.is_empty() {
        return Err(Error::contract("both Anne and Bill need at least one path"));
    }
    let n = network.paths.len();
    let mut seen = BTreeSet::new();
    for &j in anne_paths.iter().chain(bill_paths) {
        if j >= n || !seen.insert(j) {
            return Err(Error::contract(format!("path {j} is missing or assigned twice")));
        }
    }
    if seen.len() != n {
        return Err(Error::contract("the partition must cover every path"));
    }
    let half = |paths: &[usize], end: &NodeId| -> BTreeSet<NodeId> {
        let mut out: BTreeSet<NodeId> = paths.iter().flat_map(|&j| network.paths.internal(j).iter().cloned()).collect();
        out.insert(end.clone());
        out
    };
    let anne = half(anne_paths, network.alice());
    let bill = half(bill_paths, network.bob());
    if let Some(shared) = anne.intersection(&bill).next() {
        return Err(Error::contract(format!("node {shared} lies on both halves")));
    }
    let topology = Topology::from_names(&["anne", "bill"], &[("anne", "bill")], "anne", "bill")?;
    Ok(TwoPartyOt { variant, network: network.clone(), anne, bill, topology })
}

impl TwoPartyOt {
    /// The two-node network the derived protocol runs on.
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn side_of(&self, node: &NodeId) -> Option<Side> {
        if self.anne.contains(node) {
            Some(Side::Anne)
        } else if self.bill.contains(node) {
            Some(Side::Bill)
        } else {
            None
        }
    }

    pub fn nodes(&self, side: Side) -> &BTreeSet<NodeId> {
        match side {
            Side::Anne => &self.anne,
            Side::Bill => &self.bill,
        }
    }

    /// All nodes of the dishonest side corrupted, under that side's endpoint.
    pub fn corruption(&self, dishonest: Option<Side>) -> Result<CorruptionSet> {
        let t = &self.network.topology;
        match dishonest {
            None => Ok(CorruptionSet::honest(t)),
            Some(side) => {
                let (end, controller) = match side {
                    Side::Anne => (t.alice(), Controller::Alice),
                    Side::Bill => (t.bob(), Controller::Bob),
                };
                let corrupted = self.nodes(side).iter().filter(|n| *n != end).cloned();
                CorruptionSet::new(t, corrupted, controller)
            }
        }
    }

    pub fn run(
        &self,
        s0: BitString,
        s1: BitString,
        c: ChoiceBit,
        dishonest: Option<Side>,
        adversary: Option<&mut dyn Adversary>,
        rng: &mut dyn Randomness,
    ) -> Result<TwoPartyRun> {
        let inst = PathOtInstance::new(s0, s1, c, self.variant)?;
        let corruption = self.corruption(dishonest)?;
        let run = run_path_ot(&inst, &self.network, &corruption, adversary, rng)?;
        let mut crossings = Vec::new();
        for e in &run.transcript.entries {
            if let Some((from, to)) = self.crossing(&e.sender, &e.receiver)? {
                crossings.push(Crossing::Message { round: e.round, from, to, payload: e.payload.clone() });
            }
        }
        for s in &run.transcript.ot_sessions {
            let OtSession { round, sender, receiver, m0, m1, choice, .. } = s;
            if let Some((from, to)) = self.crossing(sender, receiver)? {
                crossings.push(Crossing::LinkOt { round: *round, sender: from, receiver: to, m0: *m0, m1: *m1, choice: *choice });
            }
        }
        Ok(TwoPartyRun { output: run.bob_output, crossings, view: run.view })
    }

    fn crossing(&self, a: &NodeId, b: &NodeId) -> Result<Option<(Side, Side)>> {
        let side = |n: &NodeId| self.side_of(n).ok_or_else(|| Error::contract(format!("{n} belongs to neither side")));
        let (x, y) = (side(a)?, side(b)?);
        Ok((x != y).then_some((x, y)))
    }

    /// Choice hiding against a dishonest Anne.
    pub fn epsilon_receiver(&self, ell: usize) -> Result<BigRational> {
        epsilon_receiver(self.variant, &self.network, &self.corruption(Some(Side::Anne))?, ell)
    }

    /// Input hiding against a dishonest Bill.
    pub fn sender_security(&self, ell: usize) -> Result<SenderSecurity> {
        epsilon_sender(self.variant, &self.network, &self.corruption(Some(Side::Bill))?, ell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::fixtures;
    use crate::rng::SeededRng;
    use num_traits::Zero;

    fn diamond() -> Network {
        let (t, p) = fixtures::diamond().unwrap();
        Network::new(t, p)
    }

    #[test]
    fn partition_checks() {
        let n = diamond();
        assert!(anne_bill_reduction(Variant::Protocol1, &n, &[0], &[]).is_err());
        assert!(anne_bill_reduction(Variant::Protocol1, &n, &[0], &[0]).is_err());
        assert!(anne_bill_reduction(Variant::Protocol1, &n, &[0, 1], &[2]).is_err());
        assert!(anne_bill_reduction(Variant::Protocol1, &n, &[0], &[1]).is_ok());
    }

    #[test]
    fn crossings_stay_on_the_single_link() {
        let r = anne_bill_reduction(Variant::Protocol1, &diamond(), &[0], &[1]).unwrap();
        let run = r
            .run("1".parse().unwrap(), "0".parse().unwrap(), ChoiceBit::ONE, None, None, &mut SeededRng::new(2))
            .unwrap();
        assert_eq!(run.output, "0".parse().unwrap());
        assert!(!run.crossings.is_empty());
        assert!(r.topology().has_edge(&Side::Anne.node(), &Side::Bill.node()));
    }

    #[test]
    fn each_dishonest_half_leaves_the_other_secure() {
        let r = anne_bill_reduction(Variant::Protocol1, &diamond(), &[0], &[1]).unwrap();
        assert!(r.epsilon_receiver(1).unwrap().is_zero());
        assert!(r.sender_security(1).unwrap().epsilon.is_zero());
    }
}
