//! Epsilon-insensitive support vector regression solved in the dual by
//! sequential minimal optimization.
//!
//! The dual is written over `2n` variables `a = (a+, a-)` with labels
//! `s = (+1.., -1..)`:
//!
//! ```text
//! min 1/2 a^T Q a + p^T a,  Q_ij = s_i s_j K_ij,  p = (eps - y, eps + y)
//! s.t. s^T a = 0,  0 <= a <= C
//! ```
//!
//! Predictions are `sum_j (a+_j - a-_j) K(x_j, x) + b`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{InputScaler, OutputScaler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvrKernel {
    Gaussian,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrConfig {
    /// Box constant `C`, on standardized outputs.
    pub box_constant: f64,
    /// Half-width of the insensitive tube, in output standard deviations.
    pub epsilon: f64,
    /// Gaussian width on `[0, 1]`-scaled inputs; `1/d` when unset.
    pub gaussian_width: Option<f64>,
    /// Stopping threshold on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        Self { box_constant: 1.0, epsilon: 0.1, gaussian_width: None, tolerance: 1e-6, max_iter: 100_000 }
    }
}

impl SvrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.box_constant > 0.0) {
            return Err(Error::Configuration("svmr.box_constant must be positive".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Configuration("svmr.epsilon must be non-negative".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Configuration("svmr.tolerance must be positive".into()));
        }
        if matches!(self.gaussian_width, Some(w) if !(w > 0.0)) {
            return Err(Error::Configuration("svmr.gaussian_width must be positive".into()));
        }
        Ok(())
    }
}

/// Raw solution of the dual.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrSolution {
    pub alpha_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
    pub bias: f64,
    /// Maximal KKT violation at exit.
    pub violation: f64,
    /// `1/2 a^T Q a + p^T a` at exit.
    pub objective: f64,
    pub iterations: usize,
}

impl SvrSolution {
    /// `a+_j - a-_j`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.alpha_plus.iter().zip(&self.alpha_minus).map(|(p, m)| p - m).collect()
    }
}

/// Solves the dual for a precomputed kernel matrix.
pub fn solve_dual(k: &DMatrix<f64>, y: &[f64], c: f64, eps: f64, tol: f64, max_iter: usize) -> Result<SvrSolution> {
    let n = y.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if k.shape() != (n, n) {
        return Err(Error::Shape { expected: n, got: k.nrows() });
    }
    let l = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let q = |a: usize, b: usize| sign(a) * sign(b) * k[(a % n, b % n)];
    let mut alpha = vec![0.0; l];
    let mut grad: Vec<f64> = (0..l).map(|t| if t < n { eps - y[t] } else { eps + y[t - n] }).collect();
    let p = grad.clone();
    let tau = 1e-12;

    let mut iterations = 0;
    let violation = loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i = usize::MAX;
        let mut j = usize::MAX;
        for t in 0..l {
            let st = sign(t);
            let up = if st > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            let low = if st > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
            let v = -st * grad[t];
            if up && v > gmax {
                gmax = v;
                i = t;
            }
            if low && v < gmin {
                gmin = v;
                j = t;
            }
        }
        let violation = gmax - gmin;
        if i == usize::MAX || j == usize::MAX || violation < tol {
            break violation.max(0.0);
        }
        if iterations >= max_iter {
            return Err(Error::Convergence { iterations, violation });
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        if sign(i) != sign(j) {
            let quad = (q(i, i) + q(j, j) + 2.0 * qij).max(tau);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * qij).max(tau);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    };

    // Bias from free variables, else the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum, mut free) = (0.0, 0usize);
    for t in 0..l {
        let yg = sign(t) * grad[t];
        if alpha[t] >= c {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            sum += yg;
            free += 1;
        }
    }
    let rho = if free > 0 { sum / free as f64 } else { (ub + lb) / 2.0 };
    let objective = 0.5 * (0..l).map(|t| alpha[t] * (grad[t] - p[t])).sum::<f64>()
        + (0..l).map(|t| p[t] * alpha[t]).sum::<f64>();

    Ok(SvrSolution {
        alpha_plus: alpha[..n].to_vec(),
        alpha_minus: alpha[n..].to_vec(),
        bias: -rho,
        violation,
        objective,
        iterations,
    })
}

fn kernel(kind: SvrKernel, width: f64, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        SvrKernel::Linear => a.iter().zip(b).map(|(u, v)| u * v).sum(),
        SvrKernel::Gaussian => {
            let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
            (-d2 / (width * width)).exp()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrFit {
    pub kernel: SvrKernel,
    pub width: f64,
    pub solution: SvrSolution,
    support: Vec<Vec<f64>>,
    x_scaler: InputScaler,
    y_scaler: OutputScaler,
}

impl SvrFit {
    pub fn fit(data: &Dataset, kind: SvrKernel, config: &SvrConfig) -> Result<Self> {
        config.validate()?;
        if data.len() < 2 {
            return Err(Error::InsufficientData { needed: 2, got: data.len() });
        }
        let x_scaler = InputScaler::fit(&data.x);
        let y_scaler = OutputScaler::fit(&data.y);
        let z: Vec<Vec<f64>> = data.x.iter().map(|p| x_scaler.scale(p)).collect();
        let ys: Vec<f64> = data.y.iter().map(|v| y_scaler.scale(*v)).collect();
        let width = config.gaussian_width.unwrap_or(1.0 / data.dims().max(1) as f64);
        let n = z.len();
        let k = DMatrix::from_fn(n, n, |i, j| kernel(kind, width, &z[i], &z[j]));
        let solution = solve_dual(&k, &ys, config.box_constant, config.epsilon, config.tolerance, config.max_iter)?;
        Ok(Self { kernel: kind, width, solution, support: z, x_scaler, y_scaler })
    }

    pub fn dims(&self) -> usize {
        self.x_scaler.dims()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let z = self.x_scaler.scale(x);
        let s: f64 = self
            .support
            .iter()
            .zip(self.solution.alpha_plus.iter().zip(&self.solution.alpha_minus))
            .map(|(sj, (ap, am))| if ap == am { 0.0 } else { (ap - am) * kernel(self.kernel, self.width, sj, &z) })
            .sum();
        self.y_scaler.unscale(s + self.solution.bias)
    }
}
