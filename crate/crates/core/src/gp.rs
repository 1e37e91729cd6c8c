//! Kriging surrogate: polynomial trend plus a Gaussian-correlated residual
//! process, with correlation lengths fitted by minimizing the profile
//! criterion `|R|^(1/n) * sigma^2`.
//!
//! Inputs are mapped to `[0, 1]` per dimension and outputs standardized before
//! fitting; predictions are transformed back to the original units.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design_space::TrainingSet;
use crate::error::{Error, Result};
use crate::linalg::{poly_features, InputScaler, OutputScaler, PolyOrder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpConfig {
    /// Trend order. Lowered automatically when the sample is too small or the
    /// trend basis is rank deficient.
    pub trend: PolyOrder,
    pub theta_start: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Initial nugget added to the correlation diagonal.
    pub nugget: f64,
    /// Largest nugget tried (escalating by x10) before giving up.
    pub max_nugget: f64,
    /// Pattern search stops once an accepted move improves the criterion by
    /// less than this relative amount.
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Skip the hyperparameter search and use these correlation lengths.
    #[serde(skip)]
    pub fixed_theta: Option<Vec<f64>>,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            trend: PolyOrder::Quadratic,
            theta_start: 10.0,
            theta_min: 0.1,
            theta_max: 20.0,
            nugget: 1e-8,
            max_nugget: 1e-4,
            rel_tol: 1e-8,
            max_evals: 200,
            fixed_theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpHyperParams {
    pub theta: Vec<f64>,
    /// Process variance in the original output units.
    pub sigma2: f64,
    pub nugget: f64,
}

/// Gaussian spatial correlation `exp(-sum_m theta_m (a_m - b_m)^2)`.
pub fn gaussian_correlation(theta: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape { expected: a.len(), got: b.len() });
    }
    if theta.len() != a.len() {
        return Err(Error::Shape { expected: a.len(), got: theta.len() });
    }
    Ok(correlation(theta, a, b))
}

#[inline]
fn correlation(theta: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for m in 0..theta.len() {
        let d = a[m] - b[m];
        s += theta[m] * d * d;
    }
    (-s).exp()
}

/// A fitted kriging model.
#[derive(Debug, Clone, PartialEq)]
pub struct GpFit {
    hyper: GpHyperParams,
    order: PolyOrder,
    x_scaler: InputScaler,
    y_scaler: OutputScaler,
    /// Scaled training designs, one per row.
    z: Vec<Vec<f64>>,
    /// GLS trend coefficients (standardized units, scaled inputs).
    beta: DVector<f64>,
    /// `R^-1 (y - F beta)`.
    gamma: DVector<f64>,
    /// Lower Cholesky factor of the correlation matrix.
    chol: DMatrix<f64>,
    /// `L^-1 F`.
    ft: DMatrix<f64>,
    /// Upper triangular factor of `L^-1 F = Q G`.
    g: DMatrix<f64>,
    /// Profile variance in standardized units.
    sigma2_std: f64,
}

struct Assessment {
    criterion: f64,
    nugget: f64,
    chol: DMatrix<f64>,
    ft: DMatrix<f64>,
    g: DMatrix<f64>,
    beta: DVector<f64>,
    gamma: DVector<f64>,
    sigma2: f64,
}

struct Problem<'a> {
    z: &'a [Vec<f64>],
    f: DMatrix<f64>,
    y: DVector<f64>,
    sqdiff: Vec<Vec<f64>>,
    cfg: &'a GpConfig,
}

impl Problem<'_> {
    fn assess(&self, theta: &[f64]) -> Option<Assessment> {
        let n = self.z.len();
        let mut base = DMatrix::<f64>::identity(n, n);
        let mut p = 0;
        for i in 0..n {
            for j in i + 1..n {
                let s: f64 = self.sqdiff[p].iter().zip(theta).map(|(d, t)| d * t).sum();
                let r = (-s).exp();
                base[(i, j)] = r;
                base[(j, i)] = r;
                p += 1;
            }
        }
        let mut nugget = self.cfg.nugget;
        loop {
            let mut r = base.clone();
            for i in 0..n {
                r[(i, i)] += nugget;
            }
            if let Some(ch) = r.cholesky() {
                return self.finish(ch.l(), nugget);
            }
            nugget *= 10.0;
            if nugget > self.cfg.max_nugget * (1.0 + 1e-12) {
                return None;
            }
        }
    }

    fn finish(&self, l: DMatrix<f64>, nugget: f64) -> Option<Assessment> {
        let n = self.z.len();
        let ft = l.solve_lower_triangular(&self.f)?;
        let yt = l.solve_lower_triangular(&self.y)?;
        let qr = ft.clone().qr();
        let q = qr.q();
        let g = qr.r();
        let qty = q.transpose() * &yt;
        let beta = g.solve_upper_triangular(&qty)?;
        let resid = &yt - &ft * &beta;
        let sigma2 = resid.norm_squared() / n as f64;
        let gamma = l.transpose().solve_upper_triangular(&resid)?;
        let log_det: f64 = (0..n).map(|i| 2.0 * l[(i, i)].ln()).sum();
        let criterion = (log_det / n as f64).exp() * sigma2;
        if !criterion.is_finite() {
            return None;
        }
        Some(Assessment { criterion, nugget, chol: l, ft, g, beta, gamma, sigma2 })
    }
}

/// Fits a kriging model to `(x, y)`.
pub fn fit_gp(x: &[Vec<f64>], y: &[f64], cfg: &GpConfig) -> Result<GpFit> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if y.len() != n {
        return Err(Error::Shape { expected: n, got: y.len() });
    }
    let d = x[0].len();
    if let Some(bad) = x.iter().find(|p| p.len() != d) {
        return Err(Error::Shape { expected: d, got: bad.len() });
    }
    let x_scaler = InputScaler::fit(x);
    let y_scaler = OutputScaler::fit(y);
    let z: Vec<Vec<f64>> = x.iter().map(|p| x_scaler.scale(p)).collect();
    let yv = DVector::from_iterator(n, y.iter().map(|v| y_scaler.scale(*v)));

    let order = choose_trend(&z, cfg.trend);
    let f = DMatrix::from_fn(n, order.terms(d), |i, j| poly_features(&z[i], order)[j]);
    let mut sqdiff = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            sqdiff.push((0..d).map(|m| (z[i][m] - z[j][m]).powi(2)).collect());
        }
    }
    let problem = Problem { z: &z, f, y: yv, sqdiff, cfg };

    let (theta, a) = match &cfg.fixed_theta {
        Some(t) => {
            if t.len() != d {
                return Err(Error::Shape { expected: d, got: t.len() });
            }
            let a = problem.assess(t).ok_or(Error::Conditioning { nugget: cfg.max_nugget })?;
            (t.clone(), a)
        }
        None => optimize_theta(&problem, d)?,
    };

    Ok(GpFit {
        hyper: GpHyperParams {
            theta,
            sigma2: a.sigma2 * y_scaler.std * y_scaler.std,
            nugget: a.nugget,
        },
        order,
        x_scaler,
        y_scaler,
        z,
        beta: a.beta,
        gamma: a.gamma,
        chol: a.chol,
        ft: a.ft,
        g: a.g,
        sigma2_std: a.sigma2,
    })
}

/// Fits objective `i` of a training set.
pub fn fit_gp_objective(data: &TrainingSet, i: usize, cfg: &GpConfig) -> Result<GpFit> {
    fit_gp(&data.designs(), &data.objective(i), cfg)
}

fn choose_trend(z: &[Vec<f64>], wanted: PolyOrder) -> PolyOrder {
    let n = z.len();
    let d = z[0].len();
    let mut order = wanted;
    loop {
        let q = order.terms(d);
        if q < n {
            let f = DMatrix::from_fn(n, q, |i, j| poly_features(&z[i], order)[j]);
            let sv = f.singular_values();
            if sv.min() > 1e-10 * sv.max() {
                return order;
            }
        }
        match order.lower() {
            Some(o) => order = o,
            None => return PolyOrder::Constant,
        }
    }
}

/// Coordinate-wise pattern search on `log theta` with multiplicative steps.
fn optimize_theta(problem: &Problem<'_>, d: usize) -> Result<(Vec<f64>, Assessment)> {
    let cfg = problem.cfg;
    let (lmin, lmax) = (cfg.theta_min.ln(), cfg.theta_max.ln());
    let mut u = vec![cfg.theta_start.ln().clamp(lmin, lmax); d];
    let to_theta = |u: &[f64]| u.iter().map(|v| v.exp()).collect::<Vec<_>>();
    let mut best = problem.assess(&to_theta(&u)).ok_or(Error::Conditioning { nugget: cfg.max_nugget })?;
    let mut evals = 1;
    let mut step = std::f64::consts::LN_2;
    'search: while step > 1e-4 && evals < cfg.max_evals {
        let mut moved = false;
        for m in 0..d {
            for dir in [1.0, -1.0] {
                let mut cand = u.clone();
                cand[m] = (cand[m] + dir * step).clamp(lmin, lmax);
                if cand[m] == u[m] {
                    continue;
                }
                evals += 1;
                if let Some(a) = problem.assess(&to_theta(&cand)) {
                    if a.criterion < best.criterion {
                        let rel = (best.criterion - a.criterion) / best.criterion.abs().max(f64::MIN_POSITIVE);
                        u = cand;
                        best = a;
                        moved = true;
                        if rel < cfg.rel_tol {
                            break 'search;
                        }
                        break;
                    }
                }
                if evals >= cfg.max_evals {
                    break 'search;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((to_theta(&u), best))
}

impl GpFit {
    pub fn hyper(&self) -> &GpHyperParams {
        &self.hyper
    }

    pub fn theta(&self) -> &[f64] {
        &self.hyper.theta
    }

    pub fn dims(&self) -> usize {
        self.x_scaler.dims()
    }

    pub fn trend_order(&self) -> PolyOrder {
        self.order
    }

    pub fn n_train(&self) -> usize {
        self.z.len()
    }

    /// Trend value in original units.
    pub fn trend(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let f = poly_features(&self.x_scaler.scale(x), self.order);
        let t: f64 = f.iter().zip(self.beta.iter()).map(|(a, b)| a * b).sum();
        Ok(self.y_scaler.unscale(t))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dims() {
            return Err(Error::Shape { expected: self.dims(), got: x.len() });
        }
        Ok(())
    }

    /// Predictive mean and mean squared error at `x`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        Ok(self.predict_many(std::slice::from_ref(&x.to_vec()))?[0])
    }

    /// Predictive means only; skips the variance solve.
    pub fn predict_mean_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let theta = &self.hyper.theta;
        xs.iter()
            .map(|x| {
                self.check_dim(x)?;
                let z = self.x_scaler.scale(x);
                let f = DVector::from_vec(poly_features(&z, self.order));
                let r: f64 = self.z.iter().zip(self.gamma.iter()).map(|(zi, g)| g * correlation(theta, zi, &z)).sum();
                Ok(self.y_scaler.unscale(f.dot(&self.beta) + r))
            })
            .collect()
    }

    /// Predictive `(mean, mse)` for many points at once.
    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        for x in xs {
            self.check_dim(x)?;
        }
        let n = self.z.len();
        let m = xs.len();
        let zs: Vec<Vec<f64>> = xs.iter().map(|x| self.x_scaler.scale(x)).collect();
        let theta = &self.hyper.theta;
        let r = DMatrix::from_fn(n, m, |i, j| correlation(theta, &self.z[i], &zs[j]));
        let rt = self.chol.solve_lower_triangular(&r).expect("cholesky factor has a positive diagonal");
        let s2 = self.y_scaler.std * self.y_scaler.std;
        let out = (0..m)
            .map(|j| {
                let f = DVector::from_vec(poly_features(&zs[j], self.order));
                let mean_std = f.dot(&self.beta) + r.column(j).dot(&self.gamma);
                let rtj = rt.column(j);
                let u = self.ft.transpose() * rtj - &f;
                let v = self.g.transpose().solve_lower_triangular(&u).unwrap_or_else(|| DVector::zeros(u.len()));
                let mse_std = self.sigma2_std * (1.0 + v.norm_squared() - rtj.norm_squared());
                (self.y_scaler.unscale(mean_std), (mse_std * s2).max(0.0))
            })
            .collect();
        Ok(out)
    }
}
