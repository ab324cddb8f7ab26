use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ChoiceBit};
use crate::classical_ot::Ciphertext;
use crate::netsim::NodeId;

/// Protocol message bodies.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// Bob's share of his choice bit, headed for the first hop of `path`.
    ChoiceShare { path: usize, share: ChoiceBit },
    /// A link-OT output forwarded to Bob.
    Masked { path: usize, value: BitString },
    /// Alice's shares of both inputs, headed for the last hop of `path`.
    InputShares { path: usize, s0: BitString, s1: BitString },
    /// Classical OT: receiver's key and encrypted choice.
    DdhRequest { public_key: u64, choice: Ciphertext },
    /// Classical OT: sender's two chunked replies.
    DdhResponse { z0: Vec<Ciphertext>, z1: Vec<Ciphertext> },
    /// Plain data, used by test programs.
    Data { value: BitString },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Hop over a network link.
    Link,
    /// Direct private channel between any two nodes.
    Private,
}

/// A message travelling along an explicit route. `hop` is the index in
/// `route` of the node currently holding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub route: Vec<NodeId>,
    pub hop: usize,
    pub channel: Channel,
    pub payload: Payload,
}

impl Envelope {
    pub fn holder(&self) -> &NodeId {
        &self.route[self.hop]
    }

    pub fn next_hop(&self) -> Option<&NodeId> {
        self.route.get(self.hop + 1)
    }

    pub fn destination(&self) -> &NodeId {
        self.route.last().expect("routes are nonempty")
    }
}
