//! Monte Carlo and splitting estimates of the logical failure probability.

mod anchor;
mod bennett;
mod ladder;
mod metropolis;
mod monte_carlo;
mod noise;
mod splitting;

pub use anchor::{asymptotic_anchor, binomial, Anchor, AnchorSource};
pub use bennett::{
    acceptance_ratio_at, bennett_ratio, fermi, mean_variance, RatioEstimate, MIN_OVERLAP,
};
pub use ladder::{direction, make_ladder, Direction};
pub use metropolis::{acceptance_probability, sample_failures, FailureSamples, MetropolisState};
pub use monte_carlo::{
    mc_blocks, monte_carlo_block, monte_carlo_estimate, sample_chain, McEstimate, MC_BLOCK,
};
pub use noise::{chain_log_probability, NoiseModel, RateFamily};
pub use splitting::{
    jobs_for, run_sequential, sample_rate, splitting_estimate, splitting_estimate_sequential,
    RateJob, RateSamples, RungRecord, SplittingOptions, SplittingProblem, SplittingResult,
};

use crate::chain::ErrorChain;
use crate::error::EstimateError;
use crate::geometry::{min_odd_chain, DecodingGraph};

/// Deterministic uncorrectable starting chain: a shortest odd chain with an
/// empty syndrome, i.e. the loop around a defect or the shortest path
/// between defects.
pub fn initial_failure_chain(graph: &DecodingGraph) -> Result<ErrorChain, EstimateError> {
    min_odd_chain(graph).ok_or(EstimateError::NoFailureChain)
}
