use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::FitError;

/// One measured (or generated) logical error rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub p: f64,
    pub r: usize,
    pub p_l: f64,
    /// Relative standard error of `p_l`; zero marks exact data.
    pub sigma_rel: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub sigma: f64,
    /// Fitted `ln P_L` at `r = 0`.
    pub intercept: f64,
    pub points: usize,
}

/// Weights `1/σ²` for `ln P_L`, or `None` when every point is exact.
fn weights(points: &[DataPoint]) -> Result<Option<Vec<f64>>, FitError> {
    for pt in points {
        if !(pt.p_l > 0.0 && pt.p_l.is_finite()) {
            return Err(FitError::InvalidPoint(format!(
                "P_L = {} at r = {}",
                pt.p_l, pt.r
            )));
        }
        if !(pt.sigma_rel >= 0.0 && pt.sigma_rel.is_finite()) {
            return Err(FitError::InvalidPoint(format!(
                "sigma_rel = {}",
                pt.sigma_rel
            )));
        }
    }
    let exact = points.iter().filter(|pt| pt.sigma_rel == 0.0).count();
    match exact {
        0 => Ok(Some(
            points.iter().map(|pt| pt.sigma_rel.powi(-2)).collect(),
        )),
        n if n == points.len() => Ok(None),
        _ => Err(FitError::InvalidPoint(
            "mix of exact and uncertain points".into(),
        )),
    }
}

/// Weighted least squares of `ln P_L` against `r`; `α` is minus the slope.
/// Exact points are fitted unweighted with the spread taken from the
/// residuals.
pub fn fit_alpha(points: &[DataPoint]) -> Result<AlphaFit, FitError> {
    let mut rs: Vec<usize> = points.iter().map(|pt| pt.r).collect();
    rs.sort_unstable();
    rs.dedup();
    if rs.len() < 2 {
        return Err(FitError::TooFewPoints(rs.len(), 2));
    }
    let w = weights(points)?;
    let wi = |i: usize| w.as_ref().map_or(1.0, |w| w[i]);
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, pt) in points.iter().enumerate() {
        let (x, y) = (pt.r as f64, pt.p_l.ln());
        s += wi(i);
        sx += wi(i) * x;
        sy += wi(i) * y;
        sxx += wi(i) * x * x;
        sxy += wi(i) * x * y;
    }
    let det = s * sxx - sx * sx;
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / s;
    let var = match w {
        Some(_) => s / det,
        None => {
            let rss: f64 = points
                .iter()
                .map(|pt| (pt.p_l.ln() - intercept - slope * pt.r as f64).powi(2))
                .sum();
            let dof = points.len().saturating_sub(2).max(1);
            rss / dof as f64 * s / det
        }
    };
    Ok(AlphaFit {
        alpha: -slope,
        sigma: var.sqrt(),
        intercept,
        points: points.len(),
    })
}

/// Coefficients of the fitting formula
///
/// ```text
/// ln P_L(p, r) = 2 r ln p + x(p) + (r - r0) (c + ln(1 + y(p)))
/// x(p) = x0 + x1 p + x2 p^2,   y(p) = y1 p + y2 p^2 + y3 p^3
/// ```
///
/// so that `-α(p) = c + 2 ln p + ln(1 + y(p))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzCoefficients {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub c: f64,
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

pub const DEFAULT_R0: usize = 2;

impl AnsatzCoefficients {
    pub fn x(&self, p: f64) -> f64 {
        self.x0 + p * (self.x1 + p * self.x2)
    }

    pub fn y(&self, p: f64) -> f64 {
        p * (self.y1 + p * (self.y2 + p * self.y3))
    }

    pub fn alpha(&self, p: f64) -> f64 {
        -(self.c + 2.0 * p.ln() + (1.0 + self.y(p)).ln())
    }

    pub fn log_p_l(&self, p: f64, r: usize, r0: usize) -> f64 {
        2.0 * r0 as f64 * p.ln() + self.x(p) - self.alpha(p) * (r as f64 - r0 as f64)
    }

    pub fn p_l(&self, p: f64, r: usize, r0: usize) -> f64 {
        self.log_p_l(p, r, r0).exp()
    }

    fn from_slice(v: &[f64]) -> Self {
        Self {
            x0: v[0],
            x1: v[1],
            x2: v[2],
            c: v[3],
            y1: v[4],
            y2: v[5],
            y3: v[6],
        }
    }
}

pub const COEFFICIENT_NAMES: [&str; 7] = ["x0", "x1", "x2", "c", "y1", "y2", "y3"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzOptions {
    pub r0: usize,
    /// Fix `c` instead of fitting it (`4 ln 2` reproduces the leading
    /// binomial count of the noiseless loop).
    pub pin_c: Option<f64>,
    /// Degree of `y`; 2 fixes `y3 = 0`.
    pub y_degree: usize,
    pub max_iterations: usize,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        Self {
            r0: DEFAULT_R0,
            pin_c: None,
            y_degree: 3,
            max_iterations: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub coefficients: AnsatzCoefficients,
    /// Covariance of the coefficients in [`COEFFICIENT_NAMES`] order; rows of
    /// fixed coefficients are zero.
    pub covariance: Vec<Vec<f64>>,
    /// `(ln P_L - model) / σ` per point, or the raw difference for exact
    /// data.
    pub residuals: Vec<f64>,
    pub chi2: f64,
    pub dof: usize,
    pub iterations: usize,
    /// `α(p)` of the fitted formula at each distinct rate of the data.
    pub alpha: Vec<(f64, f64)>,
    /// Ratio of smallest to largest singular value of the scaled design.
    pub condition: f64,
}

/// Internal parametrisation: polynomials in `u = p / scale` so that the
/// columns of the design are of comparable size.
struct Problem<'a> {
    points: &'a [DataPoint],
    weights: Vec<f64>,
    r0: usize,
    scale: f64,
    free: Vec<usize>,
    fixed: [f64; 7],
}

impl Problem<'_> {
    fn full(&self, theta: &[f64]) -> [f64; 7] {
        let mut v = self.fixed;
        for (k, &i) in self.free.iter().enumerate() {
            v[i] = theta[k];
        }
        v
    }

    /// Model `ln P_L` and the gradient over all seven scaled parameters;
    /// `None` if `1 + y <= 0` at this point.
    fn model(&self, v: &[f64; 7], pt: &DataPoint) -> Option<(f64, [f64; 7])> {
        let u = pt.p / self.scale;
        let x = v[0] + u * (v[1] + u * v[2]);
        let y = u * (v[4] + u * (v[5] + u * v[6]));
        if 1.0 + y <= 0.0 {
            return None;
        }
        let dr = pt.r as f64 - self.r0 as f64;
        let f = 2.0 * pt.r as f64 * pt.p.ln() + x + dr * (v[3] + (1.0 + y).ln());
        let g = dr / (1.0 + y);
        Some((f, [1.0, u, u * u, dr, g * u, g * u * u, g * u * u * u]))
    }

    /// Weighted residuals and Jacobian over the free parameters.
    fn evaluate(&self, theta: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let v = self.full(theta);
        let n = self.points.len();
        let mut res = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, self.free.len());
        for (i, pt) in self.points.iter().enumerate() {
            let (f, grad) = self.model(&v, pt)?;
            let sw = self.weights[i].sqrt();
            res[i] = (pt.p_l.ln() - f) * sw;
            for (k, &j) in self.free.iter().enumerate() {
                jac[(i, k)] = grad[j] * sw;
            }
        }
        Some((res, jac))
    }

    fn unscale(&self, v: &[f64; 7]) -> [f64; 7] {
        let s = self.scale;
        [
            v[0],
            v[1] / s,
            v[2] / (s * s),
            v[3],
            v[4] / s,
            v[5] / (s * s),
            v[6] / (s * s * s),
        ]
    }

    fn unit(&self, i: usize) -> f64 {
        let s = self.scale;
        [
            1.0,
            1.0 / s,
            1.0 / (s * s),
            1.0,
            1.0 / s,
            1.0 / (s * s),
            1.0 / (s * s * s),
        ][i]
    }
}

/// Nonlinear weighted least squares of the fitting formula. Starts from the
/// linear fit with `y = 0` and refines with Levenberg-Marquardt.
pub fn fit_ansatz(points: &[DataPoint], options: &AnsatzOptions) -> Result<FitResult, FitError> {
    let w = weights(points)?;
    let exact = w.is_none();
    let weights = w.unwrap_or_else(|| vec![1.0; points.len()]);
    if !points.iter().any(|pt| pt.r == options.r0) {
        return Err(FitError::InvalidPoint(format!(
            "no data at r0 = {}",
            options.r0
        )));
    }
    let mut free: Vec<usize> = vec![0, 1, 2];
    if options.pin_c.is_none() {
        free.push(3);
    }
    let y_degree = options.y_degree.clamp(1, 3);
    free.extend((0..y_degree).map(|k| 4 + k));
    if points.len() < free.len() {
        return Err(FitError::TooFewPoints(points.len(), free.len()));
    }
    let mut fixed = [0.0; 7];
    fixed[3] = options.pin_c.unwrap_or(0.0);
    let scale = points.iter().map(|pt| pt.p).fold(0.0, f64::max);
    let prob = Problem {
        points,
        weights,
        r0: options.r0,
        scale,
        free,
        fixed,
    };

    // linear start: y = 0
    let lin: Vec<usize> = prob.free.iter().copied().filter(|&i| i < 4).collect();
    let mut theta = vec![0.0; prob.free.len()];
    {
        let (res0, jac0) = prob.evaluate(&theta).expect("y = 0 is admissible");
        let cols: Vec<usize> = (0..prob.free.len())
            .filter(|&k| lin.contains(&prob.free[k]))
            .collect();
        let a = DMatrix::from_fn(points.len(), cols.len(), |i, k| jac0[(i, cols[k])]);
        let sol = a
            .clone()
            .svd(true, true)
            .solve(&res0, 1e-12)
            .map_err(|_| FitError::Singular)?;
        for (k, &col) in cols.iter().enumerate() {
            theta[col] = sol[k];
        }
    }

    let (_, jac) = prob.evaluate(&theta).ok_or(FitError::Singular)?;
    let sv = jac.clone().singular_values();
    let condition = sv.min() / sv.max();
    if !(condition > 1e-10) {
        return Err(FitError::Singular);
    }

    let cost = |theta: &[f64]| prob.evaluate(theta).map(|(r, _)| r.norm_squared());
    let mut current = cost(&theta).ok_or(FitError::Singular)?;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let (res, jac) = prob.evaluate(&theta).expect("accepted point is admissible");
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &res;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for k in 0..a.nrows() {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(delta) = a.cholesky().map(|c| c.solve(&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
            match cost(&trial) {
                Some(c) if c <= current => {
                    let gain = current - c;
                    theta = trial;
                    current = c;
                    lambda = (lambda / 10.0).max(1e-15);
                    improved = gain > 1e-15 * current.max(1e-300) && delta.norm() > 1e-14;
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !improved {
            break;
        }
    }

    let (res, jac) = prob.evaluate(&theta).expect("accepted point is admissible");
    let dof = points.len() - prob.free.len();
    let jtj = jac.transpose() * &jac;
    let inv = jtj.try_inverse().ok_or(FitError::Singular)?;
    // exact data: scale by the residual variance
    let factor = if exact {
        res.norm_squared() / dof.max(1) as f64
    } else {
        1.0
    };
    let mut covariance = vec![vec![0.0; 7]; 7];
    for (a, &i) in prob.free.iter().enumerate() {
        for (b, &j) in prob.free.iter().enumerate() {
            covariance[i][j] = inv[(a, b)] * factor * prob.unit(i) * prob.unit(j);
        }
    }
    let v = prob.full(&theta);
    let coefficients = AnsatzCoefficients::from_slice(&prob.unscale(&v));
    let mut ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    Ok(FitResult {
        coefficients,
        covariance,
        residuals: res.iter().copied().collect(),
        chi2: res.norm_squared(),
        dof,
        iterations,
        alpha: ps.iter().map(|&p| (p, coefficients.alpha(p))).collect(),
        condition,
    })
}

impl FitResult {
    pub fn sigma(&self, name: &str) -> Option<f64> {
        let i = COEFFICIENT_NAMES.iter().position(|&n| n == name)?;
        Some(self.covariance[i][i].sqrt())
    }
}
