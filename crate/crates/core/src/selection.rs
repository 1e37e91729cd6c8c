//! Model selection by Monte-Carlo cross-validation and utopia estimation.
//!
//! Each portfolio member is scored on two criteria over the same random
//! train/validation splits:
//!
//! * `E1`, the root mean of the per-split validation mean squared errors;
//! * `E2`, the root mean squared deviation of the split fits' predictions at
//!   the full-data utopia design from the full-data utopia value.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::{fit_model, BmlrPrior, Dataset, FittedModel, ModelKind, ModelSettings};
use crate::seed::{derive_seed, rng_for};

/// Optimization direction of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// `true` if `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub repeats: usize,
    pub train_fraction: f64,
    /// Weight of criterion 1 in the combined score; criterion 2 gets the rest.
    pub criterion1_weight: f64,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { repeats: 100, train_fraction: 0.8, criterion1_weight: 0.5, seed: 0 }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Configuration("cv.repeats must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Configuration("cv.train_fraction must lie in (0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.criterion1_weight) {
            return Err(Error::Configuration("cv.criterion1_weight must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    Crit1,
    Crit2,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtopiaEstimate {
    pub value: f64,
    pub design: Vec<f64>,
    /// `None` for a fixed, non-estimated utopia.
    pub model: Option<ModelKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScore {
    pub kind: ModelKind,
    pub e1: f64,
    pub e2: f64,
    /// Min-max normalized criteria and their weighted sum, filled in by
    /// [`select_model`].
    pub n1: f64,
    pub n2: f64,
    pub combined: f64,
}

/// A scored portfolio member with its full-data fit.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub score: ModelScore,
    pub estimate: Option<UtopiaEstimate>,
    pub fit: Option<FittedModel>,
}

/// Row indices in canonical order (designs lexicographically, then outputs).
fn canonical_order(data: &Dataset) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|&a, &b| {
        data.x[a]
            .iter()
            .zip(&data.x[b])
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(data.y[a].total_cmp(&data.y[b]))
    });
    idx
}

fn train_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(1, n - 1)
}

/// Split number `l`: `(train, validation)` row indices, each listed in
/// canonical row order so that the split does not depend on how the rows of
/// `data` are arranged.
pub fn mc_split(data: &Dataset, cfg: &CvConfig, l: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let canon = canonical_order(data);
    let mut pos: Vec<usize> = (0..n).collect();
    pos.shuffle(&mut rng_for(cfg.seed, "mc-split", l as u64));
    let m = train_size(n, cfg.train_fraction);
    let mut train: Vec<usize> = pos[..m].to_vec();
    let mut val: Vec<usize> = pos[m..].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    Ok((train.into_iter().map(|p| canon[p]).collect(), val.into_iter().map(|p| canon[p]).collect()))
}

/// Best prediction of `model` over `grid` for the given sense; the first grid
/// point wins ties.
pub fn best_on_grid(model: &FittedModel, grid: &[Vec<f64>], sense: Sense) -> Result<UtopiaEstimate> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let preds = model.predict_many(grid)?;
    let mut best = 0;
    for (i, p) in preds.iter().enumerate() {
        if sense.better(*p, preds[best]) || (preds[best].is_nan() && !p.is_nan()) {
            best = i;
        }
    }
    Ok(UtopiaEstimate { value: preds[best], design: grid[best].clone(), model: Some(model.kind()) })
}

/// Fits `kind` on all of `data` and returns its utopia estimate over `grid`.
pub fn estimate_utopia_full(
    data: &Dataset,
    kind: ModelKind,
    grid: &[Vec<f64>],
    sense: Sense,
    settings: &ModelSettings,
    prior: Option<&BmlrPrior>,
    seed: u64,
) -> Result<(UtopiaEstimate, FittedModel)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let fit = fit_model(kind, data, settings, prior, derive_seed(seed, "full-fit", 0))?;
    Ok((best_on_grid(&fit, grid, sense)?, fit))
}

/// Settings for the split fits: the kriging model reuses the full-data
/// correlation lengths instead of searching again on every split.
fn split_settings(settings: &ModelSettings, full: &FittedModel) -> ModelSettings {
    let mut s = settings.clone();
    if let Some(gp) = full.as_gp() {
        s.gp.fixed_theta = Some(gp.theta().to_vec());
    }
    s
}

/// `(E1, E2)` for one model; `+inf` for both when any fit fails.
fn cross_validate(
    data: &Dataset,
    kind: ModelKind,
    reference: &UtopiaEstimate,
    settings: &ModelSettings,
    prior: Option<&BmlrPrior>,
    cv: &CvConfig,
) -> Result<(f64, f64)> {
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for l in 0..cv.repeats {
        let (train, val) = mc_split(data, cv, l)?;
        let fit = match fit_model(kind, &data.subset(&train), settings, prior, derive_seed(cv.seed, "split-fit", l as u64)) {
            Ok(f) => f,
            Err(e) => {
                log::debug!("{kind} split {l} failed: {e}");
                return Ok((f64::INFINITY, f64::INFINITY));
            }
        };
        let mut mse = 0.0;
        for &i in &val {
            mse += (data.y[i] - fit.predict(&data.x[i])?).powi(2);
        }
        s1 += mse / val.len() as f64;
        s2 += (fit.predict(&reference.design)? - reference.value).powi(2);
    }
    let finite = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    Ok((finite((s1 / cv.repeats as f64).sqrt()), finite((s2 / cv.repeats as f64).sqrt())))
}

/// Criterion 1 for a single model.
pub fn criterion1(data: &Dataset, kind: ModelKind, settings: &ModelSettings, cv: &CvConfig) -> Result<f64> {
    cv.validate()?;
    let fit = match fit_model(kind, data, settings, None, derive_seed(cv.seed, "full-fit", 0)) {
        Ok(f) => f,
        Err(_) => return Ok(f64::INFINITY),
    };
    let reference = UtopiaEstimate { value: 0.0, design: data.x[0].clone(), model: None };
    Ok(cross_validate(data, kind, &reference, &split_settings(settings, &fit), None, cv)?.0)
}

/// Criterion 2 for a single model, relative to its own full-data utopia
/// estimate over `grid`.
pub fn criterion2(
    data: &Dataset,
    kind: ModelKind,
    grid: &[Vec<f64>],
    sense: Sense,
    settings: &ModelSettings,
    cv: &CvConfig,
) -> Result<f64> {
    cv.validate()?;
    let (est, fit) = match estimate_utopia_full(data, kind, grid, sense, settings, None, cv.seed) {
        Ok(r) => r,
        Err(Error::EmptyGrid) => return Err(Error::EmptyGrid),
        Err(_) => return Ok(f64::INFINITY),
    };
    Ok(cross_validate(data, kind, &est, &split_settings(settings, &fit), None, cv)?.1)
}

/// Scores every kind in `kinds` on both criteria. Fit failures give infinite
/// scores rather than errors.
pub fn score_portfolio(
    data: &Dataset,
    kinds: &[ModelKind],
    grid: &[Vec<f64>],
    sense: Sense,
    settings: &ModelSettings,
    prior: Option<&BmlrPrior>,
    cv: &CvConfig,
) -> Result<Vec<Candidate>> {
    cv.validate()?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if data.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: data.len() });
    }
    kinds
        .par_iter()
        .map(|&kind| {
            let failed = |kind| Candidate {
                score: ModelScore { kind, e1: f64::INFINITY, e2: f64::INFINITY, n1: f64::INFINITY, n2: f64::INFINITY, combined: f64::INFINITY },
                estimate: None,
                fit: None,
            };
            let (est, fit) = match estimate_utopia_full(data, kind, grid, sense, settings, prior, cv.seed) {
                Ok(r) => r,
                Err(e) => {
                    log::debug!("{kind} full fit failed: {e}");
                    return Ok(failed(kind));
                }
            };
            if !est.value.is_finite() {
                return Ok(failed(kind));
            }
            let (e1, e2) = cross_validate(data, kind, &est, &split_settings(settings, &fit), prior, cv)?;
            Ok(Candidate {
                score: ModelScore { kind, e1, e2, n1: f64::NAN, n2: f64::NAN, combined: f64::NAN },
                estimate: Some(est),
                fit: Some(fit),
            })
        })
        .collect()
}

fn min_max(values: &[f64]) -> Vec<f64> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|v| {
            if !v.is_finite() {
                f64::INFINITY
            } else if hi > lo {
                (v - lo) / (hi - lo)
            } else {
                0.0
            }
        })
        .collect()
}

/// Normalizes the scores in place and returns the index of the winner under
/// `mode`. Earlier entries win ties.
pub fn select_model(scores: &mut [ModelScore], mode: SelectionMode, criterion1_weight: f64) -> Result<usize> {
    let n1 = min_max(&scores.iter().map(|s| s.e1).collect::<Vec<_>>());
    let n2 = min_max(&scores.iter().map(|s| s.e2).collect::<Vec<_>>());
    for (s, (a, b)) in scores.iter_mut().zip(n1.into_iter().zip(n2)) {
        s.n1 = a;
        s.n2 = b;
        s.combined = if a.is_finite() && b.is_finite() {
            2.0 * criterion1_weight * a + 2.0 * (1.0 - criterion1_weight) * b
        } else {
            f64::INFINITY
        };
    }
    let key = |s: &ModelScore| match mode {
        SelectionMode::Crit1 => s.n1,
        SelectionMode::Crit2 => s.n2,
        SelectionMode::Both => s.combined,
    };
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        let k = key(s);
        if k.is_finite() && best.is_none_or(|b| k < key(&scores[b])) {
            best = Some(i);
        }
    }
    best.ok_or(Error::SelectionFailure)
}
