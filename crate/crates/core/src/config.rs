//! Experiment files: one TOML document describing the problem, the grid, the
//! run settings, the architectures and the weight sweep.
//!
//! Every section is optional and falls back to the defaults of the
//! corresponding library type. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::acquisition::{AcquisitionConfig, WeightVector};
use crate::design_space::DesignGrid;
use crate::driver::{standard_weights, Architecture, RunConfig};
use crate::error::{Error, Result};
use crate::gp::GpConfig;
use crate::portfolio::{BmlrConfig, ModelKind, SvrConfig};
use crate::problems::{Benchmark, BenchmarkConfig, Problem, ThinTube, TubeConfig};
use crate::selection::CvConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemName {
    #[default]
    Benchmark,
    Thintube,
}

impl fmt::Display for ProblemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemName::Benchmark => "benchmark",
            ProblemName::Thintube => "thintube",
        })
    }
}

/// A weight entry: `w1` for two objectives, or the full vector.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    First(f64),
    Full(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub budget: usize,
    pub n0: usize,
    pub portfolio: Vec<ModelKind>,
}

impl Default for RunSection {
    fn default() -> Self {
        let d = RunConfig::default();
        Self { budget: d.budget, n0: d.n0, portfolio: d.portfolio }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemName,
    pub seed: u64,
    pub out: PathBuf,
    pub architectures: Vec<Architecture>,
    /// The eleven-point sweep when absent.
    pub weights: Option<Vec<WeightSpec>>,
    pub benchmark: BenchmarkConfig,
    pub tube: TubeConfig,
    pub run: RunSection,
    pub acquisition: AcquisitionConfig,
    pub cv: CvConfig,
    pub gp: GpConfig,
    pub svmr: SvrConfig,
    pub bmlr: BmlrConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let d = RunConfig::default();
        Self {
            problem: ProblemName::default(),
            seed: 0,
            out: PathBuf::from("out"),
            architectures: vec![Architecture::C],
            weights: None,
            benchmark: BenchmarkConfig::default(),
            tube: TubeConfig::default(),
            run: RunSection::default(),
            acquisition: d.acquisition,
            cv: d.cv,
            gp: d.gp,
            svmr: d.svmr,
            bmlr: d.bmlr,
        }
    }
}

/// A resolved experiment ready to execute.
pub struct Experiment {
    pub problem: Box<dyn Problem>,
    pub grid: DesignGrid,
    pub weights: Vec<WeightVector>,
    pub architectures: Vec<Architecture>,
    pub run: RunConfig,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Configuration(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Configuration(m) => Error::Configuration(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            budget: self.run.budget,
            n0: self.run.n0,
            architecture: self.architectures.first().copied().unwrap_or(Architecture::C),
            seed: self.seed,
            portfolio: self.run.portfolio.clone(),
            acquisition: self.acquisition.clone(),
            cv: self.cv.clone(),
            gp: self.gp.clone(),
            svmr: self.svmr.clone(),
            bmlr: self.bmlr.clone(),
        }
    }

    fn resolve_weights(&self, n_objectives: usize) -> Result<Vec<WeightVector>> {
        let Some(specs) = &self.weights else {
            return Ok(standard_weights());
        };
        if specs.is_empty() {
            return Err(Error::Configuration("weights: list is empty".into()));
        }
        specs
            .iter()
            .map(|s| {
                let w = match s {
                    WeightSpec::First(w1) if n_objectives == 2 => vec![*w1, 1.0 - *w1],
                    WeightSpec::First(w1) => {
                        return Err(Error::Configuration(format!(
                            "weights: scalar entry {w1} only allowed with two objectives"
                        )))
                    }
                    WeightSpec::Full(v) => v.clone(),
                };
                if w.len() != n_objectives {
                    return Err(Error::Configuration(format!(
                        "weights: {w:?} has {} entries, problem has {n_objectives} objectives",
                        w.len()
                    )));
                }
                WeightVector::new(w).map_err(|e| Error::Configuration(format!("weights: {e}")))
            })
            .collect()
    }

    /// Validates every section and builds the problem and grid.
    pub fn resolve(&self) -> Result<Experiment> {
        let (problem, grid): (Box<dyn Problem>, DesignGrid) = match self.problem {
            ProblemName::Benchmark => {
                let grid = Benchmark::grid(&self.benchmark).map_err(|e| Error::Configuration(format!("benchmark: {e}")))?;
                (Box::new(Benchmark), grid)
            }
            ProblemName::Thintube => {
                let tube = ThinTube::new(self.tube.clone())?;
                let grid = tube.grid().map_err(|e| Error::Configuration(format!("tube: {e}")))?;
                (Box::new(tube), grid)
            }
        };
        if self.architectures.is_empty() {
            return Err(Error::Configuration("architectures: list is empty".into()));
        }
        let weights = self.resolve_weights(problem.n_objectives())?;
        let run = self.run_config();
        run.validate()?;
        Ok(Experiment { problem, grid, weights, architectures: self.architectures.clone(), run, out: self.out.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let exp = cfg.resolve().unwrap();
        assert_eq!(exp.weights.len(), 11);
        assert_eq!(exp.grid.len(), 10000);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::from_toml("[run]\nbudjet = 3\n").unwrap_err().to_string();
        assert!(err.contains("budjet"), "{err}");
    }

    #[test]
    fn unknown_architecture_is_named() {
        let err = ExperimentConfig::from_toml("architectures = [\"C\", \"Q\"]\n").unwrap_err().to_string();
        assert!(err.contains("Q"), "{err}");
    }

    #[test]
    fn weights_forms() {
        let cfg = ExperimentConfig::from_toml("weights = [0.25, [0.5, 0.5]]\n").unwrap();
        let w = cfg.resolve().unwrap().weights;
        assert_eq!(w[0].as_slice(), &[0.25, 0.75]);
        assert_eq!(w[1].as_slice(), &[0.5, 0.5]);
        assert!(ExperimentConfig::from_toml("weights = []\n").unwrap().resolve().is_err());
        assert!(ExperimentConfig::from_toml("weights = [[0.5, 0.25]]\n").unwrap().resolve().is_err());
    }

    #[test]
    fn tube_sections() {
        let cfg = ExperimentConfig::from_toml("problem = \"thintube\"\n[tube]\nsteps = [5, 5, 5]\ndelta_t = 50.0\n").unwrap();
        let exp = cfg.resolve().unwrap();
        assert_eq!(exp.problem.name(), "thintube");
        assert_eq!(exp.grid.len(), 125);
        let bad = ExperimentConfig::from_toml("problem = \"thintube\"\n[tube]\npoisson = 0.7\n").unwrap();
        assert!(bad.resolve().is_err());
    }
}
