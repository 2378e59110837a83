use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use log::{info, warn};
use qecsplit::analysis::{emit_results, per_cycle, Method, Readout, ResultRecord};
use qecsplit::circuit_noise::build_3d_decoding_graph;
use qecsplit::error::{CircuitError, EstimateError};
use qecsplit::geometry::{build_lattice, code_distance, DecodingGraph};
use qecsplit::rare_event::{
    initial_failure_chain, make_ladder, mc_blocks, monte_carlo_block, sample_rate,
    splitting_estimate, Anchor, AnchorSource, McEstimate, RateFamily, RateJob, RateSamples,
    SplittingOptions, SplittingProblem, SplittingResult,
};
use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::{AnchorPolicy, ConfigError, ExperimentConfig, MethodChoice};

/// Failure of a run, sorted by exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("splitting ladder broke at r = {r}, p = {p}: {source}")]
    Overlap {
        r: usize,
        p: f64,
        source: EstimateError,
    },
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Overlap { .. } => 3,
            RunError::Io(_) => 4,
            RunError::Other(_) => 1,
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        RunError::Io(format!("{}: {e}", path.display()))
    }
}

/// A decoding graph with the rate family its errors are drawn from.
pub struct Instance {
    pub graph: DecodingGraph,
    pub family: RateFamily,
    /// Readout cycles the estimate covers; 1 for noiseless readout.
    pub cycles: usize,
}

/// Builds the graph estimated at `(r, p)`. Noisy-readout graphs carry
/// weights for the target rate `p`, so they are built per point.
pub fn build_instance(config: &ExperimentConfig, r: usize, p: f64) -> Result<Instance, RunError> {
    let kind = config.error_kind;
    let params = kind.params(r, config.s(r), config.b(r));
    let lattice =
        build_lattice(params).map_err(|e| ConfigError::new("geometry", format!("r = {r}: {e}")))?;
    match config.readout {
        Readout::Noiseless => {
            let lg = qecsplit::geometry::build_decoding_graph(&lattice, kind.graph_kind())
                .map_err(|e| ConfigError::new("geometry", format!("r = {r}: {e}")))?;
            let edges = lg.graph.num_edges();
            Ok(Instance {
                graph: lg.graph,
                family: RateFamily::Uniform { edges },
                cycles: 1,
            })
        }
        Readout::Noisy => {
            let t = config.t(r);
            let noisy = build_3d_decoding_graph(&lattice, t, p, kind).map_err(|e| match e {
                CircuitError::PriorTooLarge { .. } => {
                    RunError::Config(ConfigError::new("rates", format!("p = {p}: {e}")))
                }
                e => RunError::Other(format!("r = {r}, t = {t}: {e}")),
            })?;
            let family = RateFamily::Scaled(noisy.coefficients().to_vec());
            Ok(Instance {
                graph: noisy.graph,
                family,
                cycles: t,
            })
        }
    }
}

/// Everything that determines the result at one point; a stored result is
/// reused only when this matches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct PointSpec {
    method: MethodChoice,
    r: usize,
    p: f64,
    s: usize,
    b: usize,
    t: Option<usize>,
    seed: u64,
    trials: u64,
    splitting: Option<SplitSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SplitSpec {
    p_start: f64,
    anchor: AnchorPolicy,
    steps: u64,
    samples: Option<u64>,
    max_doublings: u32,
    tolerance: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct Stored<S, T> {
    spec: S,
    value: T,
}

fn load<S: DeserializeOwned + PartialEq, T: DeserializeOwned>(path: &Path, spec: &S) -> Option<T> {
    let text = std::fs::read_to_string(path).ok()?;
    match serde_json::from_str::<Stored<S, T>>(&text) {
        Ok(s) if &s.spec == spec => Some(s.value),
        Ok(_) => {
            warn!(
                "{} belongs to different settings; recomputing",
                path.display()
            );
            None
        }
        Err(e) => {
            warn!("ignoring unreadable {}: {e}", path.display());
            None
        }
    }
}

fn store<S: Serialize, T: Serialize>(path: &Path, spec: &S, value: &T) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(&Stored { spec, value }).expect("serializable");
    // write then rename, so a killed run never leaves a torn file
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| RunError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| RunError::io(path, e))
}

/// Per-rung row of `rungs_<point>.csv`.
#[derive(Serialize)]
struct RungRow {
    rung: usize,
    p_lower: f64,
    p_upper: f64,
    ratio: f64,
    c: f64,
    sigma: f64,
    steps: u64,
    flips: u64,
    acceptance: f64,
    converged: bool,
}

/// Stored outcome of one point.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct PointResult {
    record: ResultRecord,
    splitting: Option<SplittingResult>,
}

pub struct Runner<'a> {
    config: &'a ExperimentConfig,
    out: PathBuf,
    pool: rayon::ThreadPool,
    /// Walks still allowed before stopping; `None` runs to the end.
    budget: Option<AtomicUsize>,
}

impl<'a> Runner<'a> {
    pub fn new(config: &'a ExperimentConfig, stop_after: Option<usize>) -> Result<Self, RunError> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| RunError::Other(e.to_string()))?;
        let out = config.output_dir();
        std::fs::create_dir_all(&out).map_err(|e| RunError::io(&out, e))?;
        Ok(Runner {
            config,
            out,
            pool,
            budget: stop_after.map(AtomicUsize::new),
        })
    }

    pub fn output(&self) -> &Path {
        &self.out
    }

    fn point_name(&self, r: usize, p: f64) -> String {
        format!(
            "{}_{}_r{r}_p{p:e}",
            self.config.error_kind, self.config.readout
        )
    }

    fn spec(&self, r: usize, p: f64) -> PointSpec {
        let c = self.config;
        let method = c.method_at(p);
        let splitting =
            matches!(method, MethodChoice::SplitUp | MethodChoice::SplitDown).then(|| SplitSpec {
                p_start: c.p_start(method),
                anchor: c.anchor(method),
                steps: c.splitting.steps,
                samples: c.splitting.samples,
                max_doublings: c.splitting.max_doublings,
                tolerance: c.splitting.tolerance,
            });
        PointSpec {
            method,
            r,
            p,
            s: c.s(r),
            b: c.b(r),
            t: (c.readout == Readout::Noisy).then(|| c.t(r)),
            seed: c.seed,
            trials: c.mc.trials,
            splitting,
        }
    }

    /// Runs every `(r, p)` point in config order, writing `results.csv` and
    /// the curve files when done or when a point fails.
    pub fn run_all(&self) -> Result<Vec<ResultRecord>, RunError> {
        let mut records = Vec::new();
        let mut failure = None;
        'points: for &r in &self.config.r {
            for &p in &self.config.rates {
                match self.run_point(r, p) {
                    Ok(rec) => records.push(rec),
                    Err(e) => {
                        failure = Some(e);
                        break 'points;
                    }
                }
            }
        }
        emit_results(&self.out, &records).map_err(|e| RunError::io(&self.out, e))?;
        let config_path = self.out.join("config.toml");
        std::fs::write(&config_path, self.config.to_toml())
            .map_err(|e| RunError::io(&config_path, e))?;
        match failure {
            Some(e) => Err(e),
            None => Ok(records),
        }
    }

    pub fn run_point(&self, r: usize, p: f64) -> Result<ResultRecord, RunError> {
        let name = self.point_name(r, p);
        let spec = self.spec(r, p);
        let path = self.out.join("runs").join(format!("{name}.json"));
        if let Some(done) = load::<_, PointResult>(&path, &spec) {
            info!("{name}: reusing stored result");
            return Ok(done.record);
        }
        let clock = Instant::now();
        let instance = build_instance(self.config, r, p)?;
        info!(
            "{name}: graph with {} vertices, {} edges",
            instance.graph.num_vertices(),
            instance.graph.num_edges()
        );
        let (method, estimate, sigma_rel, flips, splitting) = match spec.method {
            MethodChoice::SplitUp | MethodChoice::SplitDown => {
                let res = self.split(&instance, r, p, &name, &spec)?;
                self.write_rungs(&name, &res)?;
                (
                    Method::Split,
                    res.estimate,
                    res.sigma_rel,
                    res.flips,
                    Some(res),
                )
            }
            _ => {
                let mc = self.monte_carlo(&instance.graph, &instance.family, p)?;
                if let Some(bound) = mc.upper_bound {
                    warn!(
                        "{name}: no failures in {} trials, P_L < {bound:e}",
                        mc.trials
                    );
                }
                (Method::Mc, mc.estimate, mc.sigma_rel, 0, None)
            }
        };
        let record = ResultRecord {
            method,
            error_kind: self.config.error_kind,
            readout: self.config.readout,
            p,
            r,
            p_l: per_cycle(estimate, instance.cycles),
            sigma_rel,
            seed: self.config.seed,
            flips,
            wall_time: clock.elapsed().as_secs_f64(),
        };
        info!(
            "{name}: P_L = {:e} (sigma_rel {:.3})",
            record.p_l, sigma_rel
        );
        store(
            &path,
            &spec,
            &PointResult {
                record: record.clone(),
                splitting,
            },
        )?;
        Ok(record)
    }

    /// Direct Monte Carlo, blocks spread over the worker pool.
    pub fn monte_carlo(
        &self,
        graph: &DecodingGraph,
        family: &RateFamily,
        p: f64,
    ) -> Result<McEstimate, RunError> {
        let noise = family.at(p).map_err(|e| RunError::Other(e.to_string()))?;
        let trials = self.config.mc.trials;
        let seed = self.config.seed;
        let failures: u64 = self.pool.install(|| {
            mc_blocks(trials)
                .par_iter()
                .map(|&(stream, n)| monte_carlo_block(graph, &noise, n, seed, stream))
                .collect::<Result<Vec<u64>, _>>()
                .map(|v| v.into_iter().sum())
                .map_err(|e| RunError::Other(e.to_string()))
        })?;
        Ok(McEstimate::from_counts(trials, failures))
    }

    fn split(
        &self,
        instance: &Instance,
        r: usize,
        p: f64,
        name: &str,
        spec: &PointSpec,
    ) -> Result<SplittingResult, RunError> {
        let sp = spec.splitting.as_ref().expect("splitting point");
        let graph = &instance.graph;
        let family = &instance.family;
        let overlap = |source| RunError::Overlap { r, p, source };
        let d = code_distance(graph)
            .ok_or_else(|| RunError::Other(format!("{name}: {}", EstimateError::NoFailureChain)))?;
        let ladder = make_ladder(sp.p_start, p, |q| family.ladder_weight(q, d))
            .map_err(|e| RunError::Config(ConfigError::new("splitting.p_start", e.to_string())))?;
        info!(
            "{name}: ladder of {} rates from {}",
            ladder.len(),
            sp.p_start
        );
        let dir = self.out.join("checkpoints").join(name);
        let anchor = match sp.anchor {
            AnchorPolicy::Asymptotic => Anchor::asymptotic(r, sp.p_start, self.config.error_kind),
            AnchorPolicy::Mc => {
                let path = dir.join("anchor.json");
                let mc = match load::<_, McEstimate>(&path, spec) {
                    Some(mc) => mc,
                    None => {
                        let mc = self.monte_carlo(graph, family, sp.p_start)?;
                        store(&path, spec, &mc)?;
                        mc
                    }
                };
                if mc.failures == 0 {
                    return Err(RunError::Other(format!(
                        "{name}: Monte Carlo anchor at p = {} saw no failures in {} trials; raise mc.trials",
                        sp.p_start, mc.trials
                    )));
                }
                Anchor {
                    p: sp.p_start,
                    value: mc.estimate,
                    sigma: mc.sigma_rel,
                    source: AnchorSource::MonteCarlo,
                }
            }
        };
        let start =
            initial_failure_chain(graph).map_err(|e| RunError::Other(format!("{name}: {e}")))?;
        let mut problem = SplittingProblem::new(graph, family.clone(), start);
        if let Some(n) = sp.samples {
            let kept = sp.steps - (sp.steps as f64 * problem.burn_in) as u64;
            problem.thin = (kept / n).max(1);
        }
        let options = SplittingOptions {
            steps: sp.steps,
            max_doublings: sp.max_doublings,
            tolerance: sp.tolerance,
            seed: spec.seed,
        };
        splitting_estimate(&ladder, anchor, &options, |jobs| {
            self.run_jobs(&problem, jobs, spec, &dir)
        })
        .map_err(|e| match e {
            EstimateError::Interrupted(msg) => RunError::Other(format!("{name}: stopped {msg}")),
            e @ EstimateError::RungOverlap(..) => overlap(e),
            e => RunError::Other(format!("{name}: {e}")),
        })
    }

    /// Runs a batch of walks, reading finished ones from their checkpoints
    /// and writing each new one as soon as it completes.
    fn run_jobs(
        &self,
        problem: &SplittingProblem<'_>,
        jobs: &[RateJob],
        spec: &PointSpec,
        dir: &Path,
    ) -> Result<Vec<RateSamples>, EstimateError> {
        let path = |j: &RateJob| dir.join(format!("rate{}_m{}.json", j.index, j.steps));
        let key = |j: &RateJob| (spec.clone(), j.clone());
        let mut done: Vec<Option<RateSamples>> =
            jobs.iter().map(|j| load(&path(j), &key(j))).collect();
        let mut missing: Vec<usize> = (0..jobs.len()).filter(|&i| done[i].is_none()).collect();
        let mut stopped = false;
        if let Some(budget) = &self.budget {
            let left = budget.load(Ordering::SeqCst);
            if missing.len() > left {
                missing.truncate(left);
                stopped = true;
            }
            budget.fetch_sub(missing.len(), Ordering::SeqCst);
        }
        let fresh = self.pool.install(|| {
            missing
                .par_iter()
                .map(|&i| {
                    let s = sample_rate(problem, &jobs[i])?;
                    store(&path(&jobs[i]), &key(&jobs[i]), &s)
                        .map_err(|e| EstimateError::Interrupted(e.to_string()))?;
                    Ok((i, s))
                })
                .collect::<Result<Vec<_>, EstimateError>>()
        })?;
        for (i, s) in fresh {
            done[i] = Some(s);
        }
        if stopped {
            let n = done.iter().filter(|d| d.is_some()).count();
            return Err(EstimateError::Interrupted(format!(
                "after {n} of {} walks",
                jobs.len()
            )));
        }
        Ok(done
            .into_iter()
            .map(|d| d.expect("every walk ran"))
            .collect())
    }

    fn write_rungs(&self, name: &str, res: &SplittingResult) -> Result<(), RunError> {
        let dir = self.out.join("runs");
        std::fs::create_dir_all(&dir).map_err(|e| RunError::io(&dir, e))?;
        let path = dir.join(format!("rungs_{name}.csv"));
        let io = |e: csv::Error| RunError::io(&path, e);
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        for rung in &res.rungs {
            w.serialize(RungRow {
                rung: rung.rung,
                p_lower: rung.p_lower,
                p_upper: rung.p_upper,
                ratio: rung.estimate.ratio,
                c: rung.estimate.c,
                sigma: rung.estimate.sigma,
                steps: rung.steps,
                flips: rung.flips,
                acceptance: rung.acceptance,
                converged: rung.converged,
            })
            .map_err(io)?;
        }
        w.flush().map_err(|e| RunError::io(&path, e))
    }
}
