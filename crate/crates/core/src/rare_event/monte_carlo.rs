use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::ErrorChain;
use crate::decoder::{decode, PathCache};
use crate::error::DecodeError;
use crate::geometry::{parity, syndrome_of, DecodingGraph};
use crate::rare_event::noise::NoiseModel;

/// Trials per independent random stream. Fixed, so that the result does not
/// depend on how blocks are spread over workers.
pub const MC_BLOCK: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    /// Relative standard error; infinite when nothing failed.
    pub sigma_rel: f64,
    /// `3 / trials`, reported instead of an estimate when nothing failed.
    pub upper_bound: Option<f64>,
}

impl McEstimate {
    pub fn from_counts(trials: u64, failures: u64) -> Self {
        let n = trials as f64;
        if failures == 0 {
            return McEstimate {
                trials,
                failures,
                estimate: 0.0,
                sigma_rel: f64::INFINITY,
                upper_bound: Some(3.0 / n),
            };
        }
        let p = failures as f64 / n;
        McEstimate {
            trials,
            failures,
            estimate: p,
            sigma_rel: (p * (1.0 - p) / n).sqrt() / p,
            upper_bound: None,
        }
    }
}

/// Draws a chain with independent edge flips.
pub fn sample_chain(noise: &NoiseModel, rng: &mut ChaCha8Rng) -> ErrorChain {
    let n = noise.num_edges();
    let mut chain = ErrorChain::empty(n);
    match noise {
        NoiseModel::Uniform { p, .. } if *p < 0.5 => {
            // geometric gaps between flipped edges
            let log_q = (-p).ln_1p();
            let mut e = 0usize;
            loop {
                let u: f64 = 1.0 - rng.gen::<f64>();
                let gap = (u.ln() / log_q).floor();
                if gap >= (n - e) as f64 {
                    break;
                }
                e += gap as usize;
                chain.insert(e);
                e += 1;
            }
        }
        _ => {
            for e in 0..n {
                if rng.gen::<f64>() < noise.rate(e) {
                    chain.insert(e);
                }
            }
        }
    }
    chain
}

/// Failures in `trials` independent trials drawn from random stream
/// `stream` of `seed`.
pub fn monte_carlo_block(
    graph: &DecodingGraph,
    noise: &NoiseModel,
    trials: u64,
    seed: u64,
    stream: u64,
) -> Result<u64, DecodeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut cache = PathCache::new();
    let mut failures = 0;
    for _ in 0..trials {
        let e = sample_chain(noise, &mut rng);
        let r = decode(graph, &syndrome_of(graph, &e), Some(&mut cache))?;
        if parity(graph, &r) != parity(graph, &e) {
            failures += 1;
        }
    }
    Ok(failures)
}

/// `(stream, trials)` for each block of a run.
pub fn mc_blocks(trials: u64) -> Vec<(u64, u64)> {
    let full = trials / MC_BLOCK;
    let mut out: Vec<(u64, u64)> = (0..full).map(|k| (k, MC_BLOCK)).collect();
    if trials % MC_BLOCK != 0 {
        out.push((full, trials % MC_BLOCK));
    }
    out
}

/// Fraction of independently sampled chains that the decoder fails on.
pub fn monte_carlo_estimate(
    graph: &DecodingGraph,
    noise: &NoiseModel,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, DecodeError> {
    let mut failures = 0;
    for (stream, n) in mc_blocks(trials) {
        failures += monte_carlo_block(graph, noise, n, seed, stream)?;
    }
    Ok(McEstimate::from_counts(trials, failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sampler_has_the_right_mean() {
        let noise = NoiseModel::uniform(0.03, 1000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let total: usize = (0..2000)
            .map(|_| sample_chain(&noise, &mut rng).count())
            .sum();
        let mean = total as f64 / 2000.0;
        // sd of the mean is sqrt(29.1 / 2000) ~ 0.12
        assert!((mean - 30.0).abs() < 0.6, "{mean}");
    }

    #[test]
    fn blocks_cover_trials() {
        assert_eq!(
            mc_blocks(25_000),
            vec![(0, 10_000), (1, 10_000), (2, 5_000)]
        );
        assert!(mc_blocks(0).is_empty());
    }
}
