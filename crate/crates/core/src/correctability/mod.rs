//! Correctable and uncorrectable error chains.

mod cut;
mod oracle;

pub use cut::{cut_partition, is_correctable_strong_cut, CutError};
pub use oracle::{
    brute_force_min_chains, enumerate_min_chains, is_correctable_oracle, is_degenerate, min_chains,
    OracleError, MAX_BRUTE_EDGES, MAX_FRONTIER_VERTICES,
};

use crate::chain::ErrorChain;
use crate::decoder::{decode, PathCache};
use crate::error::DecodeError;
use crate::geometry::{parity, syndrome_of, DecodingGraph};

/// Correctability under this crate's decoder: the decoded recovery chain has
/// the parity of `E`.
pub fn is_correctable_decoder_specific(
    graph: &DecodingGraph,
    chain: &ErrorChain,
    cache: Option<&mut PathCache>,
) -> Result<bool, DecodeError> {
    let s = syndrome_of(graph, chain);
    let r = decode(graph, &s, cache)?;
    Ok(parity(graph, &r) == parity(graph, chain))
}
