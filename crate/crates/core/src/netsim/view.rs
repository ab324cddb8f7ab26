use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ChoiceBit};
use crate::error::Result;
use crate::linkot::{OtLeak, OtSession};
use crate::netsim::{Channel, NodeId, Payload};

/// One hop of one message.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub session: u32,
    pub round: usize,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub destination: NodeId,
    pub channel: Channel,
    pub payload: Payload,
    /// Both endpoints honest.
    pub link_private: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocalValue {
    Bits(BitString),
    Choice(ChoiceBit),
}

/// A value held privately by one node: its inputs, draws it chose to
/// record, and its output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalRecord {
    pub session: u32,
    pub node: NodeId,
    pub label: String,
    pub value: LocalValue,
}

/// Everything that happened in one or more executions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
    pub ot_sessions: Vec<OtSession>,
    pub locals: Vec<LocalRecord>,
}

impl Transcript {
    pub fn append(&mut self, other: Transcript) {
        self.entries.extend(other.entries);
        self.ot_sessions.extend(other.ot_sessions);
        self.locals.extend(other.locals);
    }

    pub fn record(&mut self, session: u32, node: &NodeId, label: &str, value: LocalValue) {
        self.locals.push(LocalRecord { session, node: node.clone(), label: label.to_string(), value });
    }

    /// JSON lines: one transcript entry per line, then one line per link-OT session.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.entries {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        for s in &self.ot_sessions {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// What a coalition of nodes saw, in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AdversaryView {
    pub entries: Vec<TranscriptEntry>,
    pub ot_leaks: Vec<OtLeak>,
    pub internal: Vec<LocalRecord>,
}

impl AdversaryView {
    pub fn observe(transcript: &Transcript, coalition: &BTreeSet<NodeId>) -> Self {
        let mut entries: Vec<_> = transcript
            .entries
            .iter()
            .filter(|e| coalition.contains(&e.sender) || coalition.contains(&e.receiver))
            .cloned()
            .collect();
        entries.sort();
        let mut ot_leaks: Vec<_> = transcript.ot_sessions.iter().flat_map(|s| s.leaks(coalition)).collect();
        ot_leaks.sort();
        let mut internal: Vec<_> =
            transcript.locals.iter().filter(|l| coalition.contains(&l.node)).cloned().collect();
        internal.sort();
        Self { entries, ot_leaks, internal }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.ot_leaks.is_empty() && self.internal.is_empty()
    }

    /// Payloads of entries, in canonical order.
    pub fn payloads(&self) -> impl Iterator<Item = &Payload> {
        self.entries.iter().map(|e| &e.payload)
    }

    pub fn local(&self, node: &NodeId, label: &str) -> Option<&LocalValue> {
        self.internal.iter().find(|l| l.node == *node && l.label == label).map(|l| &l.value)
    }
}
