use serde::{Deserialize, Serialize};

use crate::error::EstimateError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upward,
    Downward,
}

/// Rates from `p_start` to `p_target`, each step multiplying by
/// `2^{±1/sqrt(w(p_j))}`; the last rate is exactly `p_target`.
pub fn make_ladder(
    p_start: f64,
    p_target: f64,
    weight: impl Fn(f64) -> f64,
) -> Result<Vec<f64>, EstimateError> {
    for p in [p_start, p_target] {
        if !(p > 0.0 && p < 0.5) {
            return Err(EstimateError::InvalidRate(p));
        }
    }
    let mut ladder = vec![p_start];
    if p_start == p_target {
        return Ok(ladder);
    }
    let up = p_target > p_start;
    let mut p = p_start;
    loop {
        let w = weight(p).max(f64::MIN_POSITIVE);
        let exponent = if up { 1.0 } else { -1.0 } / w.sqrt();
        p *= exponent.exp2();
        if (up && p >= p_target) || (!up && p <= p_target) {
            ladder.push(p_target);
            return Ok(ladder);
        }
        ladder.push(p);
    }
}

pub fn direction(ladder: &[f64]) -> Direction {
    if ladder.last() >= ladder.first() {
        Direction::Upward
    } else {
        Direction::Downward
    }
}
