//! Oblivious transfer between distant nodes of a network in which only
//! neighbouring nodes share a link-OT primitive.
//!
//! The crate runs the path-OT protocols on a simulated network, lets
//! corrupted nodes misbehave, and measures security exactly by enumerating
//! every random tape.

pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod classical_ot;
pub mod error;
pub mod experiment;
pub mod linkot;
pub mod netsim;
pub mod protocols;
pub mod rng;

pub use bits::{BitString, ChoiceBit};
pub use error::{Error, Result};
