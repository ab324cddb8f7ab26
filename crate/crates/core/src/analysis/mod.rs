//! Exact view distributions, distances, guessing probabilities, Monte Carlo
//! estimates and security reports.

mod distribution;
mod montecarlo;
mod report;
mod security;
mod weak;

pub use distribution::{
    exact_distribution, guessing_probability, inverse_power_of_two, ratio, statistical_distance, to_f64, Distribution,
    ViewDistribution,
};
pub use montecarlo::{monte_carlo, Estimate, MIN_TRIALS, Z_99};
pub use report::{Metric, ReportMeta, SecurityReport};
pub use security::{
    correctness_rate, epsilon_receiver, epsilon_sender, receiver_view_distribution, sender_guessing, SenderGuess, SenderSecurity,
};

pub use weak::{weak_against_alice, weak_against_bob, weak_honest_bob, ChoiceExposure, InputKnowledge};

use crate::error::Result;
use crate::netsim::CorruptionSet;
use crate::protocols::{run_path_ot, Network, PathOtInstance};

/// Coalition view distribution of one path-OT instance over all tapes.
pub fn exact_view_distribution(
    instance: &PathOtInstance,
    network: &Network,
    corruption: &CorruptionSet,
) -> Result<ViewDistribution> {
    exact_distribution(|rng| Ok(run_path_ot(instance, network, corruption, None, rng)?.view))
}
