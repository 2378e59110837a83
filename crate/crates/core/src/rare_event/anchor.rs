use log::warn;
use serde::{Deserialize, Serialize};

use crate::geometry::ErrorKind;

/// Where the value at the first ladder rate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorSource {
    Asymptotic,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub p: f64,
    pub value: f64,
    /// Relative error; zero for the closed form.
    pub sigma: f64,
    pub source: AnchorSource,
}

pub fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Low-rate logical error probability `0.5 C(4r, 2r) p^{2r}`, times `r` for
/// path-like failures.
pub fn asymptotic_anchor(r: usize, p: f64, kind: ErrorKind) -> f64 {
    if p > 0.01 {
        warn!("asymptotic anchor used at p = {p}, outside its low-rate validity");
    }
    let r64 = r as u64;
    let base = 0.5 * binomial(4 * r64, 2 * r64) * p.powi(2 * r as i32);
    match kind {
        ErrorKind::Loop => base,
        ErrorKind::Path => r as f64 * base,
    }
}

impl Anchor {
    pub fn asymptotic(r: usize, p: f64, kind: ErrorKind) -> Self {
        Anchor {
            p,
            value: asymptotic_anchor(r, p, kind),
            sigma: 0.0,
            source: AnchorSource::Asymptotic,
        }
    }
}
