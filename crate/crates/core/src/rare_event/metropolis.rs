use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::chain::ErrorChain;
use crate::decoder::{decode, PathCache};
use crate::error::{DecodeError, EstimateError};
use crate::geometry::{parity, syndrome_of, DecodingGraph, Syndrome};
use crate::rare_event::noise::{chain_log_probability, NoiseModel};

/// A Metropolis walk over uncorrectable chains.
#[derive(Clone, Debug)]
pub struct MetropolisState {
    chain: ErrorChain,
    odd: bool,
    syndrome: Vec<usize>,
    cache: PathCache,
    log_prob: f64,
    steps: u64,
    proposals: u64,
    flips: u64,
}

/// `q = min(1, π(E ⊕ e) / π(E))`.
pub fn acceptance_probability(noise: &NoiseModel, chain: &ErrorChain, e: usize) -> f64 {
    noise.flip_delta(e, chain.contains(e)).exp().min(1.0)
}

/// True iff the decoder's recovery for `E` has the wrong parity.
fn fails(
    graph: &DecodingGraph,
    syndrome: &[usize],
    odd: bool,
    cache: &mut PathCache,
) -> Result<bool, DecodeError> {
    let s = Syndrome::new(syndrome.to_vec());
    let r = decode(graph, &s, Some(cache))?;
    Ok(parity(graph, &r) != odd)
}

impl MetropolisState {
    /// Starts a walk at `chain`, which must be uncorrectable.
    pub fn new(
        graph: &DecodingGraph,
        noise: &NoiseModel,
        chain: ErrorChain,
    ) -> Result<Self, EstimateError> {
        let syndrome = syndrome_of(graph, &chain).vertices().to_vec();
        let odd = parity(graph, &chain);
        let mut cache = PathCache::new();
        if !fails(graph, &syndrome, odd, &mut cache)? {
            return Err(EstimateError::CorrectableStart);
        }
        Ok(MetropolisState {
            log_prob: chain_log_probability(noise, &chain),
            chain,
            odd,
            syndrome,
            cache,
            steps: 0,
            proposals: 0,
            flips: 0,
        })
    }

    pub fn chain(&self) -> &ErrorChain {
        &self.chain
    }

    pub fn syndrome(&self) -> &[usize] {
        &self.syndrome
    }

    pub fn log_probability(&self) -> f64 {
        self.log_prob
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Steps whose Metropolis bit was 1 (the chain was then tested).
    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    /// Steps that changed the chain.
    pub fn flips(&self) -> u64 {
        self.flips
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.flips as f64 / self.steps as f64
        }
    }

    /// Draws the proposal edge and the Metropolis bit.
    pub fn draw(&self, noise: &NoiseModel, rng: &mut ChaCha8Rng) -> (usize, bool) {
        let e = rng.gen_range(0..self.chain.universe());
        let q = acceptance_probability(noise, &self.chain, e);
        let bit = q >= 1.0 || rng.gen::<f64>() < q;
        (e, bit)
    }

    /// Completes a step for a drawn proposal. The candidate `E ⊕ e` is
    /// decoded only when `bit` is set; it replaces `E` iff it is also
    /// uncorrectable. Returns whether the chain moved.
    pub fn apply_proposal(
        &mut self,
        graph: &DecodingGraph,
        noise: &NoiseModel,
        e: usize,
        bit: bool,
    ) -> Result<bool, DecodeError> {
        self.steps += 1;
        if !bit {
            return Ok(false);
        }
        self.proposals += 1;
        let mut next = self.syndrome.clone();
        for v in graph.endpoints(e) {
            if graph.is_boundary(v) {
                continue;
            }
            match next.binary_search(&v) {
                Ok(i) => {
                    next.remove(i);
                }
                Err(i) => next.insert(i, v),
            }
        }
        let odd = self.odd ^ graph.is_logical(e);
        if !fails(graph, &next, odd, &mut self.cache)? {
            return Ok(false);
        }
        self.log_prob += noise.flip_delta(e, self.chain.contains(e));
        self.chain.toggle(e);
        self.syndrome = next;
        self.odd = odd;
        self.flips += 1;
        Ok(true)
    }

    pub fn step(
        &mut self,
        graph: &DecodingGraph,
        noise: &NoiseModel,
        rng: &mut ChaCha8Rng,
    ) -> Result<bool, DecodeError> {
        let (e, bit) = self.draw(noise, rng);
        self.apply_proposal(graph, noise, e, bit)
    }
}

/// Chains visited by a Metropolis walk, recorded after burn-in.
#[derive(Clone, Debug, Default)]
pub struct FailureSamples {
    pub chains: Vec<ErrorChain>,
    pub log_probs: Vec<f64>,
    pub steps: u64,
    pub proposals: u64,
    pub flips: u64,
}

/// Runs `steps` Metropolis steps from `start`, discards the first
/// `burn_in` steps, then records the chain after every `thin`-th step.
pub fn sample_failures(
    graph: &DecodingGraph,
    noise: &NoiseModel,
    start: ErrorChain,
    steps: u64,
    burn_in: u64,
    thin: u64,
    rng: &mut ChaCha8Rng,
) -> Result<FailureSamples, EstimateError> {
    let mut state = MetropolisState::new(graph, noise, start)?;
    let mut out = FailureSamples::default();
    let thin = thin.max(1);
    for i in 0..steps {
        state.step(graph, noise, rng)?;
        if i >= burn_in && (i - burn_in + 1) % thin == 0 {
            out.chains.push(state.chain().clone());
            out.log_probs.push(state.log_probability());
        }
    }
    out.steps = state.steps();
    out.proposals = state.proposals();
    out.flips = state.flips();
    Ok(out)
}
