//! Minimum-weight decoder: shortest paths, exact matching and recovery.

mod blossom;
mod matching;
mod mwpm;
mod paths;

pub use blossom::{max_weight_matching, MatchingSolution};
pub use matching::{exact_matching, MatchingInstance, MatchingMode};
pub use mwpm::{decode, recovery_chain, solve_problem1, solve_problem2, Pairing};
pub use paths::{cache_update, weighted_distances, PathCache, ShortestPathTree};
