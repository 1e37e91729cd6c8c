//! Bayesian additive linear regression sampled with a two-block Gibbs sampler.
//!
//! `beta | sigma^2` is multivariate normal under a normal prior and
//! `sigma^2 | beta` is inverse-gamma. The posterior summary of one fit is the
//! prior of the next, so the working coordinates (input scaler and output
//! standardization) travel with the prior.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_small, InputScaler, OutputScaler};
use crate::seed::rng_for;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmlrConfig {
    pub chains: usize,
    pub warmup_per_chain: usize,
    /// Total iterations per chain, warmup included.
    pub max_iter_per_chain: usize,
    /// Diagonal variance of the first, weakly informative prior.
    pub prior_variance: f64,
    /// Inverse-gamma shape and rate for `sigma^2`.
    pub sigma_shape: f64,
    pub sigma_rate: f64,
    /// Potential-scale-reduction level above which a fit is flagged.
    pub rhat_threshold: f64,
}

impl Default for BmlrConfig {
    fn default() -> Self {
        Self {
            chains: 4,
            warmup_per_chain: 1000,
            max_iter_per_chain: 10000,
            prior_variance: 1e4,
            sigma_shape: 0.01,
            sigma_rate: 0.01,
            rhat_threshold: 1.1,
        }
    }
}

impl BmlrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 {
            return Err(Error::Configuration("bmlr.chains must be at least 1".into()));
        }
        if self.warmup_per_chain >= self.max_iter_per_chain {
            return Err(Error::Configuration("bmlr.warmup_per_chain must be below max_iter_per_chain".into()));
        }
        if !(self.prior_variance > 0.0 && self.sigma_shape > 0.0 && self.sigma_rate > 0.0) {
            return Err(Error::Configuration("bmlr prior parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Normal prior on the coefficients `(b0, b_1..b_d)` in working coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BmlrPrior {
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub x_scaler: InputScaler,
    pub y_scaler: OutputScaler,
}

impl BmlrPrior {
    /// Zero-mean prior with `variance * I`, working coordinates taken from `data`.
    pub fn diffuse(data: &Dataset, variance: f64) -> Self {
        let p = data.dims() + 1;
        Self {
            mean: vec![0.0; p],
            cov: DMatrix::identity(p, p) * variance,
            x_scaler: InputScaler::fit(&data.x),
            y_scaler: OutputScaler::fit(&data.y),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.mean.len();
        if self.cov.shape() != (p, p) {
            return Err(Error::InvalidPrior(format!("covariance is {:?}, mean has {p} entries", self.cov.shape())));
        }
        if self.x_scaler.dims() + 1 != p {
            return Err(Error::InvalidPrior("prior dimension does not match its input scaler".into()));
        }
        if (&self.cov - self.cov.transpose()).amax() > 1e-12 * self.cov.amax().max(1e-300) {
            return Err(Error::InvalidPrior("covariance is not symmetric".into()));
        }
        if self.cov.clone().cholesky().is_none() {
            return Err(Error::InvalidPrior("covariance is not positive definite".into()));
        }
        Ok(())
    }

    fn features(&self, x: &[f64]) -> Vec<f64> {
        std::iter::once(1.0).chain(self.x_scaler.scale(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BmlrFit {
    pub posterior_mean: Vec<f64>,
    pub posterior_cov: DMatrix<f64>,
    /// Batch-means Monte-Carlo standard error of each posterior mean.
    pub mcse: Vec<f64>,
    /// Gelman-Rubin statistic per coefficient (NaN with a single chain).
    pub rhat: Vec<f64>,
    /// Set when any `rhat` exceeds the configured threshold.
    pub convergence_flagged: bool,
    pub draws: usize,
    x_scaler: InputScaler,
    y_scaler: OutputScaler,
}

impl BmlrFit {
    pub fn dims(&self) -> usize {
        self.x_scaler.dims()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let z = self.x_scaler.scale(x);
        let eta = self.posterior_mean[0] + z.iter().zip(&self.posterior_mean[1..]).map(|(a, b)| a * b).sum::<f64>();
        self.y_scaler.unscale(eta)
    }

    /// Prior for the next fit: posterior means with the posterior variances on
    /// the diagonal.
    pub fn next_prior(&self) -> BmlrPrior {
        let p = self.posterior_mean.len();
        let floor = 1e-12;
        BmlrPrior {
            mean: self.posterior_mean.clone(),
            cov: DMatrix::from_fn(p, p, |i, j| if i == j { self.posterior_cov[(i, i)].max(floor) } else { 0.0 }),
            x_scaler: self.x_scaler.clone(),
            y_scaler: self.y_scaler,
        }
    }
}

/// Runs the Gibbs sampler on `data` under `prior`.
pub fn fit_bmlr(data: &Dataset, prior: &BmlrPrior, config: &BmlrConfig, seed: u64) -> Result<BmlrFit> {
    config.validate()?;
    prior.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let p = prior.mean.len();
    if data.dims() + 1 != p {
        return Err(Error::Shape { expected: p - 1, got: data.dims() });
    }

    let mut xtx = vec![0.0; p * p];
    let mut xty = vec![0.0; p];
    let mut yty = 0.0;
    for (x, &y) in data.x.iter().zip(&data.y) {
        let f = prior.features(x);
        let ys = prior.y_scaler.scale(y);
        for i in 0..p {
            xty[i] += f[i] * ys;
            for j in 0..p {
                xtx[i * p + j] += f[i] * f[j];
            }
        }
        yty += ys * ys;
    }
    let v0inv = prior
        .cov
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidPrior("covariance is not invertible".into()))?;
    let v0inv_m0: Vec<f64> = (0..p).map(|i| (0..p).map(|j| v0inv[(i, j)] * prior.mean[j]).sum()).collect();
    let shape = config.sigma_shape + n as f64 / 2.0;

    let kept = config.max_iter_per_chain - config.warmup_per_chain;
    let mut chains: Vec<Vec<Vec<f64>>> = Vec::with_capacity(config.chains);
    for c in 0..config.chains {
        let mut rng = rng_for(seed, "bmlr-chain", c as u64);
        let mut sigma2 = 1.0;
        let mut draws = Vec::with_capacity(kept);
        let mut prec = vec![0.0; p * p];
        let mut w = vec![0.0; p];
        let mut beta = vec![0.0; p];
        for it in 0..config.max_iter_per_chain {
            for i in 0..p {
                for j in 0..p {
                    prec[i * p + j] = v0inv[(i, j)] + xtx[i * p + j] / sigma2;
                }
                w[i] = v0inv_m0[i] + xty[i] / sigma2;
            }
            if !cholesky_small(&mut prec, p) {
                return Err(Error::InvalidPrior("posterior precision lost positive definiteness".into()));
            }
            // mean = P^-1 w, draw = mean + L^-T z
            forward(&prec, p, &mut w);
            for wi in w.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *wi += z;
            }
            backward(&prec, p, &w, &mut beta);

            let mut quad = 0.0;
            let mut cross = 0.0;
            for i in 0..p {
                cross += beta[i] * xty[i];
                for j in 0..p {
                    quad += beta[i] * xtx[i * p + j] * beta[j];
                }
            }
            let rss = (yty - 2.0 * cross + quad).max(0.0);
            let rate = config.sigma_rate + rss / 2.0;
            let g = Gamma::new(shape, 1.0 / rate).expect("positive gamma parameters").sample(&mut rng);
            sigma2 = (1.0 / g).max(1e-300);
            if it >= config.warmup_per_chain {
                draws.push(beta.clone());
            }
        }
        chains.push(draws);
    }

    let all: Vec<&Vec<f64>> = chains.iter().flatten().collect();
    let total = all.len();
    let mean: Vec<f64> = (0..p).map(|i| all.iter().map(|b| b[i]).sum::<f64>() / total as f64).collect();
    let cov = DMatrix::from_fn(p, p, |i, j| {
        all.iter().map(|b| (b[i] - mean[i]) * (b[j] - mean[j])).sum::<f64>() / (total.max(2) - 1) as f64
    });
    let mcse = (0..p).map(|i| batch_means_se(all.iter().map(|b| b[i]))).collect();
    let rhat: Vec<f64> = (0..p).map(|i| gelman_rubin(&chains, i)).collect();
    let convergence_flagged = rhat.iter().any(|r| r.is_finite() && *r > config.rhat_threshold);

    Ok(BmlrFit {
        posterior_mean: mean,
        posterior_cov: cov,
        mcse,
        rhat,
        convergence_flagged,
        draws: total,
        x_scaler: prior.x_scaler.clone(),
        y_scaler: prior.y_scaler,
    })
}

/// Solves `L v = w` in place (row-major lower factor).
fn forward(l: &[f64], p: usize, w: &mut [f64]) {
    for i in 0..p {
        let mut s = w[i];
        for k in 0..i {
            s -= l[i * p + k] * w[k];
        }
        w[i] = s / l[i * p + i];
    }
}

/// Solves `L^T out = w`.
fn backward(l: &[f64], p: usize, w: &[f64], out: &mut [f64]) {
    for i in (0..p).rev() {
        let mut s = w[i];
        for k in i + 1..p {
            s -= l[k * p + i] * out[k];
        }
        out[i] = s / l[i * p + i];
    }
}

fn batch_means_se(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    let batches = (n as f64).sqrt().floor() as usize;
    if batches < 2 {
        return f64::NAN;
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches).map(|b| v[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

fn gelman_rubin(chains: &[Vec<Vec<f64>>], i: usize) -> f64 {
    let m = chains.len();
    if m < 2 {
        return f64::NAN;
    }
    let n = chains[0].len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| c.iter().map(|b| b[i]).sum::<f64>() / n).collect();
    let vars: Vec<f64> = chains
        .iter()
        .zip(&means)
        .map(|(c, mu)| c.iter().map(|b| (b[i] - mu).powi(2)).sum::<f64>() / (n - 1.0))
        .collect();
    let w = vars.iter().sum::<f64>() / m as f64;
    let grand = means.iter().sum::<f64>() / m as f64;
    let b = n * means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (m - 1) as f64;
    if w <= 0.0 {
        return 1.0;
    }
    (((n - 1.0) / n * w + b / n) / w).sqrt()
}
