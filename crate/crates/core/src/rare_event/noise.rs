use serde::{Deserialize, Serialize};

use crate::chain::ErrorChain;
use crate::error::EstimateError;

/// Independent edge flips, either at one common rate or at per-edge rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel {
    Uniform { p: f64, edges: usize },
    PerEdge(Vec<f64>),
}

fn check_rate(p: f64) -> Result<(), EstimateError> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(EstimateError::InvalidRate(p))
    }
}

impl NoiseModel {
    pub fn uniform(p: f64, edges: usize) -> Result<Self, EstimateError> {
        check_rate(p)?;
        Ok(NoiseModel::Uniform { p, edges })
    }

    pub fn per_edge(rates: Vec<f64>) -> Result<Self, EstimateError> {
        for &p in &rates {
            check_rate(p)?;
        }
        Ok(NoiseModel::PerEdge(rates))
    }

    pub fn num_edges(&self) -> usize {
        match self {
            NoiseModel::Uniform { edges, .. } => *edges,
            NoiseModel::PerEdge(r) => r.len(),
        }
    }

    pub fn rate(&self, e: usize) -> f64 {
        match self {
            NoiseModel::Uniform { p, .. } => *p,
            NoiseModel::PerEdge(r) => r[e],
        }
    }

    /// `λ(e) = ln(p(e) / (1 - p(e)))`.
    pub fn log_odds(&self, e: usize) -> f64 {
        let p = self.rate(e);
        (p / (1.0 - p)).ln()
    }

    /// Expected number of flipped edges.
    pub fn mean_weight(&self) -> f64 {
        match self {
            NoiseModel::Uniform { p, edges } => p * *edges as f64,
            NoiseModel::PerEdge(r) => r.iter().sum(),
        }
    }

    /// Change of `ln π` when edge `e` is toggled in a chain that currently
    /// does (`present`) or does not contain it.
    pub fn flip_delta(&self, e: usize, present: bool) -> f64 {
        if present {
            -self.log_odds(e)
        } else {
            self.log_odds(e)
        }
    }
}

/// `ln π(E) = Σ_{e∈E} ln p(e) + Σ_{e∉E} ln(1 - p(e))`.
pub fn chain_log_probability(noise: &NoiseModel, chain: &ErrorChain) -> f64 {
    match noise {
        NoiseModel::Uniform { p, edges } => {
            let k = chain.count() as f64;
            k * p.ln() + (*edges as f64 - k) * (-p).ln_1p()
        }
        NoiseModel::PerEdge(rates) => {
            let base: f64 = rates.iter().map(|p| (-p).ln_1p()).sum();
            base + chain.iter().map(|e| noise.log_odds(e)).sum::<f64>()
        }
    }
}

/// How a scalar physical error rate `p` turns into per-edge flip rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RateFamily {
    /// Every one of `edges` edges flips with probability `p`.
    Uniform { edges: usize },
    /// Edge `e` flips with probability `k[e] · p`.
    Scaled(Vec<f64>),
}

impl RateFamily {
    pub fn num_edges(&self) -> usize {
        match self {
            RateFamily::Uniform { edges } => *edges,
            RateFamily::Scaled(k) => k.len(),
        }
    }

    pub fn at(&self, p: f64) -> Result<NoiseModel, EstimateError> {
        match self {
            RateFamily::Uniform { edges } => NoiseModel::uniform(p, *edges),
            RateFamily::Scaled(k) => NoiseModel::per_edge(k.iter().map(|k| k * p).collect()),
        }
    }

    /// Step-size weight of the splitting ladder at rate `p`: `max(d/2, p n)`
    /// for uniform rates, the total prior `Σ p(e)` otherwise.
    pub fn ladder_weight(&self, p: f64, distance: usize) -> f64 {
        match self {
            RateFamily::Uniform { edges } => (distance as f64 / 2.0).max(p * *edges as f64),
            RateFamily::Scaled(k) => p * k.iter().sum::<f64>(),
        }
    }
}
