use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::ErrorChain;
use crate::error::EstimateError;
use crate::geometry::DecodingGraph;
use crate::rare_event::anchor::Anchor;
use crate::rare_event::bennett::{bennett_ratio, RatioEstimate};
use crate::rare_event::metropolis::sample_failures;
use crate::rare_event::noise::{chain_log_probability, RateFamily};

/// Stream offset separating splitting walks from Monte Carlo blocks.
const RATE_STREAMS: u64 = 1 << 32;

/// Fixed inputs shared by every walk of a ladder.
#[derive(Clone, Debug)]
pub struct SplittingProblem<'a> {
    pub graph: &'a DecodingGraph,
    pub family: RateFamily,
    /// Uncorrectable chain every walk starts from.
    pub start: ErrorChain,
    /// Record interval; the edge count by default.
    pub thin: u64,
    /// Fraction of steps discarded before recording.
    pub burn_in: f64,
}

impl<'a> SplittingProblem<'a> {
    pub fn new(graph: &'a DecodingGraph, family: RateFamily, start: ErrorChain) -> Self {
        SplittingProblem {
            thin: graph.num_edges() as u64,
            graph,
            family,
            start,
            burn_in: 0.1,
        }
    }
}

/// One Metropolis walk at one ladder rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateJob {
    pub index: usize,
    pub rate: f64,
    pub prev: Option<f64>,
    pub next: Option<f64>,
    pub steps: u64,
    pub seed: u64,
}

/// Log-probability ratios of the recorded chains against the neighbouring
/// rates: `prev[α] = ln π_prev(E_α) - ln π_rate(E_α)`, likewise `next`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSamples {
    pub index: usize,
    pub rate: f64,
    pub steps: u64,
    pub proposals: u64,
    pub flips: u64,
    pub prev: Vec<f64>,
    pub next: Vec<f64>,
}

pub fn sample_rate(
    problem: &SplittingProblem<'_>,
    job: &RateJob,
) -> Result<RateSamples, EstimateError> {
    let noise = problem.family.at(job.rate)?;
    let prev = job.prev.map(|p| problem.family.at(p)).transpose()?;
    let next = job.next.map(|p| problem.family.at(p)).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    rng.set_stream(RATE_STREAMS + job.index as u64);
    let burn_in = (job.steps as f64 * problem.burn_in) as u64;
    let s = sample_failures(
        problem.graph,
        &noise,
        problem.start.clone(),
        job.steps,
        burn_in,
        problem.thin,
        &mut rng,
    )?;
    let against = |other: &Option<_>| match other {
        Some(m) => s
            .chains
            .iter()
            .zip(&s.log_probs)
            .map(|(c, lp)| chain_log_probability(m, c) - lp)
            .collect(),
        None => Vec::new(),
    };
    Ok(RateSamples {
        index: job.index,
        rate: job.rate,
        steps: s.steps,
        proposals: s.proposals,
        flips: s.flips,
        prev: against(&prev),
        next: against(&next),
    })
}

pub fn run_sequential(
    problem: &SplittingProblem<'_>,
    jobs: &[RateJob],
) -> Result<Vec<RateSamples>, EstimateError> {
    jobs.iter().map(|j| sample_rate(problem, j)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingOptions {
    /// Metropolis steps per rate in the first round.
    pub steps: u64,
    /// Rounds of doubling the steps of rungs that have not settled.
    pub max_doublings: u32,
    /// Allowed change of `ln R_j` between rounds; `0.5 / rungs` by default.
    pub tolerance: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungRecord {
    pub rung: usize,
    pub p_lower: f64,
    pub p_upper: f64,
    pub estimate: RatioEstimate,
    pub steps: u64,
    pub flips: u64,
    pub acceptance: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingResult {
    pub p: f64,
    pub estimate: f64,
    pub sigma_rel: f64,
    pub anchor: Anchor,
    pub rungs: Vec<RungRecord>,
    pub flips: u64,
}

pub fn jobs_for(ladder: &[f64], indices: &[usize], steps: &[u64], seed: u64) -> Vec<RateJob> {
    indices
        .iter()
        .map(|&i| RateJob {
            index: i,
            rate: ladder[i],
            prev: i.checked_sub(1).map(|k| ladder[k]),
            next: ladder.get(i + 1).copied(),
            steps: steps[i],
            seed,
        })
        .collect()
}

fn rung(
    j: usize,
    lo: &RateSamples,
    hi: &RateSamples,
    converged: bool,
) -> Result<RungRecord, EstimateError> {
    let upper: Vec<f64> = hi.prev.iter().map(|x| -x).collect();
    let estimate = bennett_ratio(&lo.next, &upper).map_err(|e| match e {
        EstimateError::RungOverlap(_, _, g) => EstimateError::RungOverlap(j, j + 1, g),
        e => e,
    })?;
    let steps = lo.steps + hi.steps;
    Ok(RungRecord {
        rung: j,
        p_lower: lo.rate,
        p_upper: hi.rate,
        estimate,
        steps: lo.steps.max(hi.steps),
        flips: lo.flips + hi.flips,
        acceptance: (lo.flips + hi.flips) as f64 / steps.max(1) as f64,
        converged,
    })
}

/// `P_L(p_t) = anchor · Π_j R_j`, each `R_j` from Bennett's estimator on
/// walks at the two ends of rung `j`.
///
/// `run` executes a batch of walks and may do so in parallel; each walk is
/// fully determined by its job. Rungs whose ratio moves by more than the
/// tolerance when the step budget doubles are resampled, up to
/// `max_doublings` times.
pub fn splitting_estimate<F>(
    ladder: &[f64],
    anchor: Anchor,
    options: &SplittingOptions,
    mut run: F,
) -> Result<SplittingResult, EstimateError>
where
    F: FnMut(&[RateJob]) -> Result<Vec<RateSamples>, EstimateError>,
{
    let t = ladder.len();
    if t == 0 {
        return Err(EstimateError::NoSamples);
    }
    let target = ladder[t - 1];
    if t == 1 {
        return Ok(SplittingResult {
            p: target,
            estimate: anchor.value,
            sigma_rel: anchor.sigma,
            anchor,
            rungs: Vec::new(),
            flips: 0,
        });
    }
    let tol = options.tolerance.unwrap_or(0.5 / (t - 1) as f64);
    let mut steps = vec![options.steps; t];
    let all: Vec<usize> = (0..t).collect();
    let mut samples = run(&jobs_for(ladder, &all, &steps, options.seed))?;
    samples.sort_by_key(|s| s.index);
    let mut converged = vec![options.max_doublings == 0; t - 1];
    let mut rungs = (0..t - 1)
        .map(|j| rung(j, &samples[j], &samples[j + 1], converged[j]))
        .collect::<Result<Vec<_>, _>>()?;
    for _ in 0..options.max_doublings {
        let pending: Vec<usize> = (0..t - 1).filter(|&j| !converged[j]).collect();
        if pending.is_empty() {
            break;
        }
        let mut redo: Vec<usize> = pending.iter().flat_map(|&j| [j, j + 1]).collect();
        redo.dedup();
        for &i in &redo {
            steps[i] *= 2;
        }
        for s in run(&jobs_for(ladder, &redo, &steps, options.seed))? {
            let i = s.index;
            samples[i] = s;
        }
        for j in 0..t - 1 {
            if !(redo.contains(&j) || redo.contains(&(j + 1))) {
                continue;
            }
            let old = rungs[j].estimate.ratio;
            let mut new = rung(j, &samples[j], &samples[j + 1], converged[j])?;
            if !converged[j] {
                converged[j] = (new.estimate.ratio / old).ln().abs() <= tol;
                new.converged = converged[j];
            }
            rungs[j] = new;
        }
    }
    let estimate = anchor.value * rungs.iter().map(|r| r.estimate.ratio).product::<f64>();
    let var = anchor.sigma.powi(2) + rungs.iter().map(|r| r.estimate.sigma.powi(2)).sum::<f64>();
    Ok(SplittingResult {
        p: target,
        estimate,
        sigma_rel: var.sqrt(),
        anchor,
        flips: rungs.iter().map(|r| r.flips).sum(),
        rungs,
    })
}

/// [`splitting_estimate`] running every walk on the calling thread.
pub fn splitting_estimate_sequential(
    problem: &SplittingProblem<'_>,
    ladder: &[f64],
    anchor: Anchor,
    options: &SplittingOptions,
) -> Result<SplittingResult, EstimateError> {
    splitting_estimate(ladder, anchor, options, |jobs| {
        run_sequential(problem, jobs)
    })
}
