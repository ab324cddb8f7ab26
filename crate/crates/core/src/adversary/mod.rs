//! Attack strategies and harnesses.

mod claim2;
mod collude;
mod combined;
mod reduction;
mod strategies;
mod tamper;

pub use claim2::{
    claim2_attack, claim2_attack_unchecked, claim2_guess_table, claim2_monte_carlo, Claim2Outcome, GuessTable,
};
pub use collude::{colluding_bob_attack, combine_received, full_collusion, CollusionOutcome};
pub use combined::{combined_choice_guess, visible_choice_shares, visible_request};
pub use reduction::{anne_bill_reduction, Crossing, Side, TwoPartyOt, TwoPartyRun};
pub use strategies::{ChoiceVector, FlipChoiceShare, FlipMasked, Passive, Stacked};
pub use tamper::{consistency_probabilities, detection_given_runs, detection_probability, path_tamperer, tamper_attack};
