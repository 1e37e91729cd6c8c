//! Weighted-Tchebycheff scalarization and expected improvement over it.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gp::{fit_gp, GpConfig, GpFit};
use crate::seed::rng_for;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() || w.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Configuration(format!("weights must be nonnegative, got {w:?}")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Configuration(format!("weights must sum to 1, got {sum}")));
        }
        Ok(Self(w))
    }

    /// `(w, 1 - w)` for two objectives.
    pub fn pair(w1: f64) -> Result<Self> {
        Self::new(vec![w1, 1.0 - w1])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `max_i w_i |mu_i - u_i|` and the lowest index attaining it.
pub fn tchebycheff(mu: &[f64], utopia: &[f64], w: &[f64]) -> Result<(f64, usize)> {
    if mu.len() != utopia.len() || mu.len() != w.len() {
        return Err(Error::Shape { expected: w.len(), got: mu.len().min(utopia.len()) });
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..mu.len() {
        let v = w[i] * (mu[i] - utopia[i]).abs();
        if v > best.0 {
            best = (v, i);
        }
    }
    Ok(best)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Expected improvement below `best` of a normal variable `N(mu, sigma^2)`.
pub fn expected_improvement(mu: f64, sigma: f64, best: f64) -> f64 {
    let d = best - mu;
    if sigma <= 0.0 {
        return d.max(0.0);
    }
    let z = d / sigma;
    (d * normal_cdf(z) + sigma * normal_pdf(z)).max(0.0)
}

/// How the scalarized standard deviation is obtained from per-objective
/// posteriors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// `w_a * sigma_a` of the branch `a` active at the posterior means.
    ActiveBranch,
    /// Sample mean and standard deviation of the scalarization under
    /// independent per-objective normal draws.
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionConfig {
    pub batch_size: usize,
    /// Stopping threshold on the maximal EI, as a fraction of the initial best
    /// scalarized value.
    pub alpha_relative: f64,
    /// Absolute threshold overriding `alpha_relative`.
    pub alpha: Option<f64>,
    pub sigma_rule: SigmaRule,
    pub mc_samples: usize,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self { batch_size: 1, alpha_relative: 1e-4, alpha: None, sigma_rule: SigmaRule::ActiveBranch, mc_samples: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalarized {
    pub mu: f64,
    pub sigma: f64,
    pub active: usize,
}

/// Scalarized posterior at one point from per-objective means and standard
/// deviations.
pub fn scalarize_posterior(
    mu: &[f64],
    sd: &[f64],
    utopia: &[f64],
    w: &[f64],
    rule: SigmaRule,
    mc: Option<(usize, &mut dyn rand::RngCore)>,
) -> Result<Scalarized> {
    let (m, a) = tchebycheff(mu, utopia, w)?;
    match (rule, mc) {
        (SigmaRule::MonteCarlo, Some((samples, rng))) if samples > 1 => {
            let mut draw = vec![0.0; mu.len()];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..samples {
                for i in 0..mu.len() {
                    let z: f64 = rng.sample(StandardNormal);
                    draw[i] = mu[i] + sd[i] * z;
                }
                let v = tchebycheff(&draw, utopia, w)?.0;
                s += v;
                s2 += v * v;
            }
            let n = samples as f64;
            let mean = s / n;
            let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
            Ok(Scalarized { mu: mean, sigma: var.sqrt(), active: a })
        }
        _ => Ok(Scalarized { mu: m, sigma: w[a] * sd[a], active: a }),
    }
}

/// Outcome of one batch selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub designs: Vec<Vec<f64>>,
    pub converged: bool,
    /// EI, scalarized mean and sd at each pick (at the first step only when
    /// converged).
    pub max_ei: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Surrogates and the data they were fitted on.
pub struct Surrogates<'a> {
    pub fits: Vec<GpFit>,
    pub x: &'a [Vec<f64>],
    /// One column per objective.
    pub y: Vec<Vec<f64>>,
    pub gp: &'a GpConfig,
}

/// EI over the scalarization at every candidate.
pub fn score_candidates(
    fits: &[GpFit],
    candidates: &[Vec<f64>],
    utopia: &[f64],
    w: &[f64],
    best: f64,
    cfg: &AcquisitionConfig,
    seed: u64,
) -> Result<Vec<(f64, Scalarized)>> {
    let preds: Vec<Vec<(f64, f64)>> = fits.iter().map(|f| f.predict_many(candidates)).collect::<Result<_>>()?;
    let n_obj = fits.len();
    let mut mu = vec![0.0; n_obj];
    let mut sd = vec![0.0; n_obj];
    (0..candidates.len())
        .map(|c| {
            for i in 0..n_obj {
                mu[i] = preds[i][c].0;
                sd[i] = preds[i][c].1.sqrt();
            }
            let s = if cfg.sigma_rule == SigmaRule::MonteCarlo {
                let mut rng = rng_for(seed, "mc-sigma", c as u64);
                scalarize_posterior(&mu, &sd, utopia, w, cfg.sigma_rule, Some((cfg.mc_samples, &mut rng)))?
            } else {
                scalarize_posterior(&mu, &sd, utopia, w, cfg.sigma_rule, None)?
            };
            Ok((expected_improvement(s.mu, s.sigma, best), s))
        })
        .collect()
}

/// Picks up to `batch_size` candidates by maximal EI. After each pick the
/// surrogates are refitted with the pick and its predicted means added, using
/// the current correlation lengths. Returns `converged` with an empty batch
/// when the first maximal EI is at most `alpha`.
pub fn select_batch(
    surrogates: &Surrogates<'_>,
    candidates: &[Vec<f64>],
    utopia: &[f64],
    w: &WeightVector,
    best: f64,
    alpha: f64,
    cfg: &AcquisitionConfig,
    seed: u64,
) -> Result<Batch> {
    if candidates.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if cfg.batch_size == 0 {
        return Err(Error::Configuration("acquisition.batch_size must be at least 1".into()));
    }
    let w = w.as_slice();
    let mut fits = surrogates.fits.clone();
    let mut x = surrogates.x.to_vec();
    let mut y = surrogates.y.clone();
    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    let mut batch = Batch { designs: Vec::new(), converged: false, max_ei: Vec::new(), mu: Vec::new(), sigma: Vec::new() };

    for j in 0..cfg.batch_size.min(candidates.len()) {
        let pool: Vec<Vec<f64>> = remaining.iter().map(|&i| candidates[i].clone()).collect();
        let scored = score_candidates(&fits, &pool, utopia, w, best, cfg, crate::seed::derive_seed(seed, "batch", j as u64))?;
        let mut arg = 0;
        for (i, (ei, _)) in scored.iter().enumerate() {
            if *ei > scored[arg].0 {
                arg = i;
            }
        }
        let (ei, s) = scored[arg];
        batch.max_ei.push(ei);
        batch.mu.push(s.mu);
        batch.sigma.push(s.sigma);
        if j == 0 && ei <= alpha {
            batch.converged = true;
            return Ok(batch);
        }
        let pick = pool[arg].clone();
        remaining.remove(arg);
        if j + 1 < cfg.batch_size && !remaining.is_empty() {
            x.push(pick.clone());
            for (col, f) in y.iter_mut().zip(&fits) {
                col.push(f.predict(&pick)?.0);
            }
            fits = fits
                .iter()
                .zip(&y)
                .map(|(f, col)| {
                    let gp = GpConfig { fixed_theta: Some(f.theta().to_vec()), ..surrogates.gp.clone() };
                    fit_gp(&x, col, &gp)
                })
                .collect::<Result<_>>()?;
        }
        batch.designs.push(pick);
    }
    Ok(batch)
}
