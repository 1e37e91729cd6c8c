//! The regression-model portfolio used to estimate utopia points.

pub mod bmlr;
pub mod ols;
pub mod svr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::design_space::TrainingSet;
use crate::error::{Error, Result};
use crate::gp::{fit_gp, GpConfig, GpFit};
use crate::linalg::PolyOrder;

pub use bmlr::{fit_bmlr, BmlrConfig, BmlrFit, BmlrPrior};
pub use ols::{LogLinearFit, PolyFit};
pub use svr::{SvrConfig, SvrFit, SvrKernel};

/// Designs and one objective column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Shape { expected: x.len(), got: y.len() });
        }
        Ok(Self { x, y })
    }

    pub fn from_training(data: &TrainingSet, objective: usize) -> Self {
        Self { x: data.designs(), y: data.objective(objective) }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Self { x: idx.iter().map(|&i| self.x[i].clone()).collect(), y: idx.iter().map(|&i| self.y[i]).collect() }
    }

    fn all_positive(&self) -> bool {
        self.y.iter().all(|v| *v > 0.0) && self.x.iter().flatten().all(|v| *v > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Mm,
    Mlr,
    LogMlr,
    Bmlr,
    Sop,
    Svmr(SvrKernel),
    Gpm,
}

impl ModelKind {
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Mm => "MM",
            ModelKind::Mlr => "MLR",
            ModelKind::LogMlr => "LogMLR",
            ModelKind::Bmlr => "BMLR",
            ModelKind::Sop => "SOP",
            ModelKind::Svmr(SvrKernel::Gaussian) => "SVMR-gaussian",
            ModelKind::Svmr(SvrKernel::Linear) => "SVMR-linear",
            ModelKind::Gpm => "GPM",
        }
    }

    /// All seven kinds, with the given SVR kernel.
    pub fn full_portfolio(kernel: SvrKernel) -> Vec<ModelKind> {
        use ModelKind::*;
        vec![Mm, Mlr, LogMlr, Bmlr, Sop, Svmr(kernel), Gpm]
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "mm" => ModelKind::Mm,
            "mlr" => ModelKind::Mlr,
            "logmlr" => ModelKind::LogMlr,
            "bmlr" => ModelKind::Bmlr,
            "sop" => ModelKind::Sop,
            "svmr-gaussian" => ModelKind::Svmr(SvrKernel::Gaussian),
            "svmr-linear" => ModelKind::Svmr(SvrKernel::Linear),
            "gpm" => ModelKind::Gpm,
            _ => return Err(Error::Configuration(format!("unknown model kind `{s}`"))),
        };
        Ok(kind)
    }
}

impl Serialize for ModelKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for ModelKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Configuration shared by every portfolio fit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSettings {
    pub svr: SvrConfig,
    pub bmlr: BmlrConfig,
    pub gp: GpConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Poly { kind: ModelKind, fit: PolyFit },
    LogLinear(LogLinearFit),
    Bayes(Box<BmlrFit>),
    Svr(Box<SvrFit>),
    Gp(Box<GpFit>),
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Poly { kind, .. } => *kind,
            FittedModel::LogLinear(_) => ModelKind::LogMlr,
            FittedModel::Bayes(_) => ModelKind::Bmlr,
            FittedModel::Svr(f) => ModelKind::Svmr(f.kernel),
            FittedModel::Gp(_) => ModelKind::Gpm,
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            FittedModel::Poly { fit, .. } => fit.scaler.dims(),
            FittedModel::LogLinear(f) => f.coefficients.len() - 1,
            FittedModel::Bayes(f) => f.dims(),
            FittedModel::Svr(f) => f.dims(),
            FittedModel::Gp(f) => f.dims(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::Shape { expected: self.dims(), got: x.len() });
        }
        Ok(match self {
            FittedModel::Poly { fit, .. } => fit.predict(x),
            FittedModel::LogLinear(f) => f.predict(x),
            FittedModel::Bayes(f) => f.predict(x),
            FittedModel::Svr(f) => f.predict(x),
            FittedModel::Gp(f) => f.predict(x)?.0,
        })
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        match self {
            FittedModel::Gp(f) => f.predict_mean_many(xs),
            _ => xs.iter().map(|x| self.predict(x)).collect(),
        }
    }

    pub fn as_bmlr(&self) -> Option<&BmlrFit> {
        match self {
            FittedModel::Bayes(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_gp(&self) -> Option<&GpFit> {
        match self {
            FittedModel::Gp(f) => Some(f),
            _ => None,
        }
    }
}

/// Fits one model of `kind`. `prior` seeds BMLR (a diffuse prior is used when
/// absent); `seed` drives its sampler.
pub fn fit_model(
    kind: ModelKind,
    data: &Dataset,
    settings: &ModelSettings,
    prior: Option<&BmlrPrior>,
    seed: u64,
) -> Result<FittedModel> {
    let poly = |order| PolyFit::fit(data, order).map(|fit| FittedModel::Poly { kind, fit });
    match kind {
        ModelKind::Mm => poly(PolyOrder::Constant),
        ModelKind::Mlr => poly(PolyOrder::Linear),
        ModelKind::Sop => poly(PolyOrder::Quadratic),
        ModelKind::LogMlr => LogLinearFit::fit(data).map(FittedModel::LogLinear),
        ModelKind::Bmlr => {
            let diffuse;
            let prior = match prior {
                Some(p) => p,
                None => {
                    diffuse = BmlrPrior::diffuse(data, settings.bmlr.prior_variance);
                    &diffuse
                }
            };
            fit_bmlr(data, prior, &settings.bmlr, seed).map(|f| FittedModel::Bayes(Box::new(f)))
        }
        ModelKind::Svmr(kernel) => SvrFit::fit(data, kernel, &settings.svr).map(|f| FittedModel::Svr(Box::new(f))),
        ModelKind::Gpm => fit_gp(&data.x, &data.y, &settings.gp).map(|f| FittedModel::Gp(Box::new(f))),
    }
}

/// The configured kinds admissible for `data`: LogMLR is dropped unless every
/// input and output is strictly positive.
pub fn portfolio_for(configured: &[ModelKind], data: &Dataset) -> Result<Vec<ModelKind>> {
    let positive = data.all_positive();
    let kinds: Vec<ModelKind> = configured.iter().copied().filter(|k| *k != ModelKind::LogMlr || positive).collect();
    if kinds.is_empty() {
        return Err(Error::Configuration("model portfolio is empty after admissibility filtering".into()));
    }
    Ok(kinds)
}
