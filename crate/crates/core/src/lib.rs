//! Rare-event estimation of logical error rates for surface codes with
//! smooth defects under minimum-weight decoding.
//!
//! The pipeline: build a lattice and its decoding graph ([`geometry`]),
//! decode syndromes ([`decoder`]), classify chains ([`correctability`]),
//! estimate the logical error rate by splitting or Monte Carlo
//! ([`rare_event`]), optionally on a space-time graph derived from a noisy
//! readout circuit ([`circuit_noise`]), and fit the results ([`analysis`]).

pub mod analysis;
pub mod chain;
pub mod circuit_noise;
pub mod correctability;
pub mod decoder;
pub mod error;
pub mod geometry;
pub mod rare_event;

pub use chain::ErrorChain;
