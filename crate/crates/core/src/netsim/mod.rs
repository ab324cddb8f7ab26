//! Simulated message-passing network: topology, paths, corruption, a
//! synchronous round scheduler, and coalition views.

pub mod fixtures;
mod message;
mod sim;
mod topology;
mod view;

pub use message::{Channel, Envelope, Payload};
pub use sim::{
    Action, Adversary, NodeProgram, OtDelivery, OtId, RoundContext, SimOutcome, Simulation, DEFAULT_MAX_ROUNDS,
};
pub use topology::{enumerate_paths, exists_honest_path, Controller, CorruptionSet, NodeId, PathSet, Topology};
pub use view::{AdversaryView, LocalRecord, LocalValue, Transcript, TranscriptEntry};
