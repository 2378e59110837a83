use serde::{Deserialize, Serialize};

use crate::error::EstimateError;

/// Below this, the smaller g-average signals that neighbouring conditional
/// distributions barely overlap.
pub const MIN_OVERLAP: f64 = 1e-4;

const LN_C_RANGE: f64 = 50.0;
const LN_C_TOL: f64 = 1e-10;

/// `g(x) = 1 / (1 + x)`.
pub fn fermi(x: f64) -> f64 {
    1.0 / (1.0 + x)
}

/// `1 / (1 + e^{-u})`, evaluated without overflow.
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Ratio of failure probabilities between two neighbouring rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    /// Bennett's constant `C`.
    pub c: f64,
    /// Relative standard error of `ratio`.
    pub sigma: f64,
    pub samples_lower: usize,
    pub samples_upper: usize,
    /// The two g-averages at the solution.
    pub mean_lower: f64,
    pub mean_upper: f64,
}

/// Estimates `π_{j+1}(F) / π_j(F)`.
///
/// `lower` holds `ln π_{j+1}(E) - ln π_j(E)` over samples `E ~ π_j(·|F)`,
/// `upper` the same quantity over samples from `π_{j+1}(·|F)`. `C` solves
/// `<g(C π_j/π_{j+1})>_j = <g(C^{-1} π_{j+1}/π_j)>_{j+1}` by bisection on
/// `ln C`, and then the ratio equals `C`.
pub fn bennett_ratio(lower: &[f64], upper: &[f64]) -> Result<RatioEstimate, EstimateError> {
    if lower.is_empty() || upper.is_empty() {
        return Err(EstimateError::NoSamples);
    }
    // a(ln C) is non-increasing, b(ln C) non-decreasing
    let a = |lc: f64| lower.iter().map(|&l| sigmoid(l - lc)).sum::<f64>() / lower.len() as f64;
    let b = |lc: f64| upper.iter().map(|&l| sigmoid(lc - l)).sum::<f64>() / upper.len() as f64;
    let (mut lo, mut hi) = (-LN_C_RANGE, LN_C_RANGE);
    if a(lo) < b(lo) || a(hi) > b(hi) {
        return Err(EstimateError::RungOverlap(0, 1, 0.0));
    }
    while hi - lo > LN_C_TOL {
        let mid = 0.5 * (lo + hi);
        if a(mid) > b(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lc = 0.5 * (lo + hi);
    let (ma, mb) = (a(lc), b(lc));
    debug_assert!(a(lo) >= a(hi) && b(lo) <= b(hi));
    if ma.min(mb) < MIN_OVERLAP {
        return Err(EstimateError::RungOverlap(0, 1, ma.min(mb)));
    }
    let ga: Vec<f64> = lower.iter().map(|&l| sigmoid(l - lc)).collect();
    let gb: Vec<f64> = upper.iter().map(|&l| sigmoid(lc - l)).collect();
    let var = mean_variance(&ga) / (ma * ma) + mean_variance(&gb) / (mb * mb);
    let c = lc.exp();
    Ok(RatioEstimate {
        ratio: c * ma / mb,
        c,
        sigma: var.sqrt(),
        samples_lower: lower.len(),
        samples_upper: upper.len(),
        mean_lower: ma,
        mean_upper: mb,
    })
}

/// Variance of the sample mean, from batch means when there are enough
/// samples so that correlation along the walk is accounted for.
pub fn mean_variance(x: &[f64]) -> f64 {
    const BATCHES: usize = 20;
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    if n < 2 * BATCHES {
        let m = x.iter().sum::<f64>() / n as f64;
        let s2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        return s2 / n as f64;
    }
    let size = n / BATCHES;
    let means: Vec<f64> = (0..BATCHES)
        .map(|k| x[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / BATCHES as f64;
    let s2 = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    s2 / BATCHES as f64
}

/// Right-hand side of the acceptance-ratio identity for a given `C` and
/// `g`, with weighted samples `(ln π_{j+1} - ln π_j, weight)`. With exact
/// conditional probabilities as weights it equals the true ratio for every
/// `C > 0`.
pub fn acceptance_ratio_at(
    c: f64,
    g: impl Fn(f64) -> f64,
    lower: &[(f64, f64)],
    upper: &[(f64, f64)],
) -> f64 {
    let avg = |xs: &[(f64, f64)], f: &dyn Fn(f64) -> f64| {
        let w: f64 = xs.iter().map(|x| x.1).sum();
        xs.iter().map(|&(l, wt)| wt * f(l)).sum::<f64>() / w
    };
    let a = avg(lower, &|l| g(c * (-l).exp()));
    let b = avg(upper, &|l| g(l.exp() / c));
    c * a / b
}
