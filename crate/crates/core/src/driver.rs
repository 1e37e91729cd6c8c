//! The outer optimization loop: initial design, per-iteration utopia
//! estimation, surrogate fitting, batch selection and evaluation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::{select_batch, tchebycheff, AcquisitionConfig, Surrogates, WeightVector};
use crate::design_space::{initial_doe, DesignGrid, Row, TrainingSet};
use crate::error::{Error, Result};
use crate::gp::{fit_gp, GpConfig, GpFit};
use crate::numfmt::fmt_num;
use crate::portfolio::{
    portfolio_for, BmlrConfig, BmlrPrior, Dataset, ModelKind, ModelSettings, SvrConfig, SvrKernel,
};
use crate::problems::{probabilistic_feasibility, Problem};
use crate::seed::derive_seed;
use crate::selection::{
    estimate_utopia_full, score_portfolio, select_model, CvConfig, ModelScore, SelectionMode, Sense, UtopiaEstimate,
};

/// How the utopia point is obtained each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    /// Portfolio selection on criterion 1.
    A,
    /// Portfolio selection on criterion 2.
    B,
    /// Portfolio selection on both criteria.
    C,
    /// Always the additive linear model.
    D,
    /// Always the Bayesian linear model, prior carried between iterations.
    E,
    /// Fixed utopia, no estimation.
    F,
}

impl Architecture {
    pub const ALL: [Architecture; 6] =
        [Architecture::A, Architecture::B, Architecture::C, Architecture::D, Architecture::E, Architecture::F];

    pub fn selection_mode(self) -> Option<SelectionMode> {
        match self {
            Architecture::A => Some(SelectionMode::Crit1),
            Architecture::B => Some(SelectionMode::Crit2),
            Architecture::C => Some(SelectionMode::Both),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Architecture::A => "A",
            Architecture::B => "B",
            Architecture::C => "C",
            Architecture::D => "D",
            Architecture::E => "E",
            Architecture::F => "F",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::ALL
            .into_iter()
            .find(|a| a.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Configuration(format!("unknown architecture `{s}`")))
    }
}

impl Serialize for Architecture {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Architecture {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Maximum number of expensive evaluations, initial design included.
    pub budget: usize,
    pub n0: usize,
    pub architecture: Architecture,
    pub seed: u64,
    /// Portfolio members; the problem's default set when empty.
    pub portfolio: Vec<ModelKind>,
    pub acquisition: AcquisitionConfig,
    pub cv: CvConfig,
    pub gp: GpConfig,
    pub svmr: SvrConfig,
    pub bmlr: BmlrConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            budget: 150,
            n0: 10,
            architecture: Architecture::C,
            seed: 0,
            portfolio: Vec::new(),
            acquisition: AcquisitionConfig::default(),
            cv: CvConfig::default(),
            gp: GpConfig::default(),
            svmr: SvrConfig::default(),
            bmlr: BmlrConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 {
            return Err(Error::Configuration("run.n0 must be at least 1".into()));
        }
        if self.budget < self.n0 {
            return Err(Error::Configuration(format!("run.budget ({}) must be at least run.n0 ({})", self.budget, self.n0)));
        }
        if self.acquisition.batch_size == 0 {
            return Err(Error::Configuration("acquisition.batch_size must be at least 1".into()));
        }
        self.cv.validate()?;
        self.svmr.validate()?;
        self.bmlr.validate()?;
        Ok(())
    }

    fn settings(&self) -> ModelSettings {
        ModelSettings { svr: self.svmr.clone(), bmlr: self.bmlr.clone(), gp: self.gp.clone() }
    }
}

/// Default SVR kernel for a problem: Gaussian for the benchmark, linear
/// otherwise.
pub fn default_kernel(problem: &dyn Problem) -> SvrKernel {
    if problem.name() == "benchmark" {
        SvrKernel::Gaussian
    } else {
        SvrKernel::Linear
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Maximal expected improvement at or below the threshold.
    Converged,
    Budget,
    /// No feasible unsampled grid point left.
    Exhausted,
}

impl StopReason {
    pub fn tag(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::Budget => "budget",
            StopReason::Exhausted => "exhausted",
        }
    }
}

/// Utopia estimation for one objective in one iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveStep {
    pub utopia: UtopiaEstimate,
    /// Set when estimation failed and the fixed utopia was used instead.
    pub fallback: bool,
    /// Portfolio scores; empty for architectures without selection.
    pub scores: Vec<ModelScore>,
    pub bmlr_flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Expensive evaluations before this iteration's batch.
    pub evaluations: usize,
    pub feasible_rows: usize,
    pub candidates: usize,
    pub objectives: Vec<ObjectiveStep>,
    pub best_scalarized: f64,
    pub alpha: f64,
    pub max_ei: Option<f64>,
    pub picked: Vec<Vec<f64>>,
    pub picked_objectives: Vec<Vec<f64>>,
    pub pick_mu: Vec<f64>,
    pub pick_sigma: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub stop: Option<StopReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalSolution {
    pub design: Vec<f64>,
    pub objectives: Vec<f64>,
    pub scalarized: f64,
    pub utopia: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub problem: String,
    pub architecture: Architecture,
    pub weight: Vec<f64>,
    pub seed: u64,
    pub trace: Vec<IterationRecord>,
    pub data: TrainingSet,
    /// Iteration in which each row was added (0 for the initial design).
    pub row_iteration: Vec<usize>,
    pub final_solution: FinalSolution,
    pub evaluations: usize,
    pub stop: StopReason,
}

impl RunResult {
    pub fn final_utopia(&self) -> &[f64] {
        &self.final_solution.utopia
    }
}

struct Ctx<'a> {
    problem: &'a dyn Problem,
    cfg: &'a RunConfig,
    settings: ModelSettings,
    senses: Vec<Sense>,
    portfolio: Vec<ModelKind>,
    fixed: Vec<f64>,
}

fn evaluate_rows(problem: &dyn Problem, designs: &[Vec<f64>]) -> Result<Vec<Row>> {
    designs
        .iter()
        .map(|x| {
            let y = problem.evaluate(x)?;
            let feasible = problem.is_feasible(x, &y);
            Ok(Row { design: x.clone(), objectives: y, feasible })
        })
        .collect()
}

fn fit_surrogates(data: &TrainingSet, gp: &GpConfig) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<GpFit>)> {
    let x = data.designs();
    let y: Vec<Vec<f64>> = (0..data.n_objectives()).map(|i| data.objective(i)).collect();
    let fits = y.iter().map(|col| fit_gp(&x, col, gp)).collect::<Result<Vec<_>>>()?;
    Ok((x, y, fits))
}

/// Unsampled grid points passing the cheap constraints and, when the problem
/// has one, the chance constraint under the surrogate.
fn candidate_set(ctx: &Ctx<'_>, grid: &[Vec<f64>], data: &TrainingSet, fits: &[GpFit]) -> Result<Vec<Vec<f64>>> {
    let mut cands: Vec<Vec<f64>> =
        grid.iter().filter(|p| !data.contains(p) && ctx.problem.deterministic_feasible(p)).cloned().collect();
    if let Some((i, threshold, reliability)) = ctx.problem.chance_constraint() {
        let preds = fits[i].predict_many(&cands)?;
        cands = cands
            .into_iter()
            .zip(preds)
            .filter(|(_, (mu, mse))| probabilistic_feasibility(*mu, mse.sqrt(), threshold, reliability))
            .map(|(p, _)| p)
            .collect();
    }
    Ok(cands)
}

fn fixed_step(value: f64, dims: usize, fallback: bool) -> ObjectiveStep {
    ObjectiveStep {
        utopia: UtopiaEstimate { value, design: vec![f64::NAN; dims], model: None },
        fallback,
        scores: Vec::new(),
        bmlr_flagged: false,
    }
}

fn estimate_utopia(
    ctx: &Ctx<'_>,
    feasible: &TrainingSet,
    cands: &[Vec<f64>],
    priors: &mut [Option<BmlrPrior>],
    k: usize,
) -> Result<Vec<ObjectiveStep>> {
    let arch = ctx.cfg.architecture;
    let dims = feasible.dims().unwrap_or(0);
    (0..ctx.senses.len())
        .map(|i| {
            if arch == Architecture::F {
                return Ok(fixed_step(ctx.fixed[i], dims, false));
            }
            if cands.is_empty() {
                return Ok(fixed_step(ctx.fixed[i], dims, true));
            }
            let data = Dataset::from_training(feasible, i);
            let cv = CvConfig { seed: derive_seed(ctx.cfg.seed, "cv", (k * ctx.senses.len() + i) as u64), ..ctx.cfg.cv.clone() };
            let prior = priors[i].as_ref();
            match arch.selection_mode() {
                Some(mode) => {
                    let kinds = portfolio_for(&ctx.portfolio, &data)?;
                    let cands_scored = match score_portfolio(&data, &kinds, cands, ctx.senses[i], &ctx.settings, prior, &cv) {
                        Ok(c) => c,
                        Err(Error::InsufficientData { .. }) => return Ok(fixed_step(ctx.fixed[i], dims, true)),
                        Err(e) => return Err(e),
                    };
                    let mut scores: Vec<ModelScore> = cands_scored.iter().map(|c| c.score.clone()).collect();
                    let mut bmlr_flagged = false;
                    if let Some(b) = cands_scored.iter().filter_map(|c| c.fit.as_ref()?.as_bmlr()).next() {
                        bmlr_flagged = b.convergence_flagged;
                        priors[i] = Some(b.next_prior());
                    }
                    match select_model(&mut scores, mode, ctx.cfg.cv.criterion1_weight) {
                        Ok(w) => Ok(ObjectiveStep {
                            utopia: cands_scored[w].estimate.clone().expect("finite score implies an estimate"),
                            fallback: false,
                            scores,
                            bmlr_flagged,
                        }),
                        Err(Error::SelectionFailure) => {
                            log::warn!("iteration {k}: no model selected for objective {}, using fixed utopia", i + 1);
                            let mut s = fixed_step(ctx.fixed[i], dims, true);
                            s.scores = scores;
                            Ok(s)
                        }
                        Err(e) => Err(e),
                    }
                }
                None => {
                    let kind = if arch == Architecture::D { ModelKind::Mlr } else { ModelKind::Bmlr };
                    match estimate_utopia_full(&data, kind, cands, ctx.senses[i], &ctx.settings, prior, cv.seed) {
                        Ok((est, fit)) if est.value.is_finite() => {
                            let mut bmlr_flagged = false;
                            if let Some(b) = fit.as_bmlr() {
                                bmlr_flagged = b.convergence_flagged;
                                priors[i] = Some(b.next_prior());
                            }
                            Ok(ObjectiveStep { utopia: est, fallback: false, scores: Vec::new(), bmlr_flagged })
                        }
                        Ok(_) => Ok(fixed_step(ctx.fixed[i], dims, true)),
                        Err(Error::EmptyGrid) => Err(Error::EmptyGrid),
                        Err(e) => {
                            log::warn!("iteration {k}: {kind} fit failed for objective {}: {e}", i + 1);
                            Ok(fixed_step(ctx.fixed[i], dims, true))
                        }
                    }
                }
            }
        })
        .collect()
}

/// Smallest scalarized value over feasible sampled rows, with its row.
fn best_row(data: &TrainingSet, utopia: &[f64], w: &[f64]) -> Result<Option<(f64, usize)>> {
    let mut best: Option<(f64, usize)> = None;
    for (j, r) in data.rows().iter().enumerate() {
        if !r.feasible {
            continue;
        }
        let v = tchebycheff(&r.objectives, utopia, w)?.0;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, j));
        }
    }
    Ok(best)
}

/// One optimization run for a single weight vector.
pub fn run_mobo(problem: &dyn Problem, grid: &DesignGrid, w: &WeightVector, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let senses = problem.senses();
    if w.as_slice().len() != senses.len() {
        return Err(Error::Shape { expected: senses.len(), got: w.as_slice().len() });
    }
    if cfg.budget > grid.len() {
        return Err(Error::Budget { requested: cfg.budget, available: grid.len() });
    }
    let portfolio =
        if cfg.portfolio.is_empty() { ModelKind::full_portfolio(default_kernel(problem)) } else { cfg.portfolio.clone() };
    let ctx = Ctx { problem, cfg, settings: cfg.settings(), senses: senses.clone(), portfolio, fixed: problem.fixed_utopia() };
    let wv = w.as_slice();
    let points = grid.points();

    let doe = initial_doe(grid, cfg.n0, derive_seed(cfg.seed, "doe", 0))?;
    let mut data = TrainingSet::new(senses.len()).augment(evaluate_rows(problem, &doe)?)?;
    let mut row_iteration = vec![0; data.len()];
    if data.feasible().is_empty() {
        return Err(Error::InfeasibleStart);
    }

    let mut priors: Vec<Option<BmlrPrior>> = vec![None; senses.len()];
    let mut trace = Vec::new();
    let mut alpha: Option<f64> = None;
    let mut utopia: Vec<f64>;
    let mut k = 0;
    let stop = loop {
        let step = (|| -> Result<(IterationRecord, Option<Vec<Row>>)> {
            let feasible = data.feasible();
            let (x, y, fits) = fit_surrogates(&data, &cfg.gp)?;
            let cands = candidate_set(&ctx, &points, &data, &fits)?;
            let steps = estimate_utopia(&ctx, &feasible, &cands, &mut priors, k)?;
            let u: Vec<f64> = steps.iter().map(|s| s.utopia.value).collect();
            let (best, _) = best_row(&data, &u, wv)?.expect("a feasible row exists");
            let a = *alpha.get_or_insert(cfg.acquisition.alpha.unwrap_or(cfg.acquisition.alpha_relative * best));
            let mut rec = IterationRecord {
                k,
                evaluations: data.len(),
                feasible_rows: feasible.len(),
                candidates: cands.len(),
                objectives: steps,
                best_scalarized: best,
                alpha: a,
                max_ei: None,
                picked: Vec::new(),
                picked_objectives: Vec::new(),
                pick_mu: Vec::new(),
                pick_sigma: Vec::new(),
                theta: fits.iter().map(|f| f.theta().to_vec()).collect(),
                stop: None,
            };
            if data.len() >= cfg.budget {
                rec.stop = Some(StopReason::Budget);
                return Ok((rec, None));
            }
            if cands.is_empty() {
                rec.stop = Some(StopReason::Exhausted);
                return Ok((rec, None));
            }
            let acq = AcquisitionConfig {
                batch_size: cfg.acquisition.batch_size.min(cfg.budget - data.len()),
                ..cfg.acquisition.clone()
            };
            let surrogates = Surrogates { fits, x: &x, y, gp: &cfg.gp };
            let batch = select_batch(&surrogates, &cands, &u, w, best, a, &acq, derive_seed(cfg.seed, "acq", k as u64))?;
            rec.max_ei = batch.max_ei.first().copied();
            rec.pick_mu = batch.mu.clone();
            rec.pick_sigma = batch.sigma.clone();
            if batch.converged {
                rec.stop = Some(StopReason::Converged);
                return Ok((rec, None));
            }
            let rows = evaluate_rows(problem, &batch.designs)?;
            rec.picked = batch.designs;
            rec.picked_objectives = rows.iter().map(|r| r.objectives.clone()).collect();
            Ok((rec, Some(rows)))
        })();
        let (rec, rows) = step.map_err(|e| e.at_iteration(k))?;
        utopia = rec.objectives.iter().map(|s| s.utopia.value).collect();
        let stop = rec.stop;
        log::info!(
            "{} w={:?} k={k} evals={} best={:.6} max_ei={:?}",
            cfg.architecture,
            wv,
            rec.evaluations,
            rec.best_scalarized,
            rec.max_ei
        );
        trace.push(rec);
        if let Some(s) = stop {
            break s;
        }
        let rows = rows.expect("rows accompany a non-final iteration");
        row_iteration.extend(std::iter::repeat_n(k + 1, rows.len()));
        data = data.augment(rows).map_err(|e| e.at_iteration(k))?;
        k += 1;
    };

    let (scalarized, j) = best_row(&data, &utopia, wv)?.expect("a feasible row exists");
    let r = &data.rows()[j];
    let final_solution =
        FinalSolution { design: r.design.clone(), objectives: r.objectives.clone(), scalarized, utopia: utopia.clone() };
    Ok(RunResult {
        problem: problem.name().to_string(),
        architecture: cfg.architecture,
        weight: wv.to_vec(),
        seed: cfg.seed,
        trace,
        evaluations: data.len(),
        data,
        row_iteration,
        final_solution,
        stop,
    })
}

/// Seed of run `index` in a sweep.
pub fn sweep_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, "weight", index as u64)
}

/// The eleven weights `(0, 1), (0.1, 0.9), ..., (1, 0)`.
pub fn standard_weights() -> Vec<WeightVector> {
    (0..=10).map(|i| WeightVector::pair(i as f64 / 10.0).expect("valid weight")).collect()
}

/// Independent runs over `weights`; run `i` uses seed
/// [`sweep_seed`]`(cfg.seed, i)`. Results keep the input order.
pub fn run_weight_sweep(
    problem: &dyn Problem,
    grid: &DesignGrid,
    weights: &[WeightVector],
    cfg: &RunConfig,
) -> Vec<Result<RunResult>> {
    weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let run_cfg = RunConfig { seed: sweep_seed(cfg.seed, i), ..cfg.clone() };
            run_mobo(problem, grid, w, &run_cfg)
                .map_err(|e| Error::Weight { w: w.as_slice().to_vec(), source: Box::new(e) })
        })
        .collect()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

const SCORED_KINDS: [ModelKind; 8] = [
    ModelKind::Mm,
    ModelKind::Mlr,
    ModelKind::LogMlr,
    ModelKind::Bmlr,
    ModelKind::Sop,
    ModelKind::Svmr(SvrKernel::Gaussian),
    ModelKind::Svmr(SvrKernel::Linear),
    ModelKind::Gpm,
];

fn opt_num(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// One row per iteration. Columns are fixed for a given objective count and
/// design dimension; absent values are empty.
pub fn write_trace_csv<W: Write>(result: &RunResult, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let n_obj = result.weight.len();
    let dims = result.final_solution.design.len();
    let mut header: Vec<String> =
        ["k", "evaluations", "feasible_rows", "candidates", "best_scalarized", "alpha", "max_ei", "pick_mu", "pick_sigma", "stop"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    for i in 1..=n_obj {
        header.push(format!("utopia_obj{i}"));
        header.extend((1..=dims).map(|m| format!("utopia_obj{i}_x{m}")));
        header.push(format!("model_obj{i}"));
        header.push(format!("fallback_obj{i}"));
        header.push(format!("bmlr_flag_obj{i}"));
        header.extend((1..=dims).map(|m| format!("theta_obj{i}_{m}")));
    }
    header.extend((1..=dims).map(|m| format!("pick_x{m}")));
    header.extend((1..=n_obj).map(|i| format!("pick_y{i}")));
    for i in 1..=n_obj {
        for kind in SCORED_KINDS {
            for c in ["e1", "e2", "combined"] {
                header.push(format!("{}_obj{i}_{c}", kind.tag()));
            }
        }
    }
    wtr.write_record(&header)?;
    for rec in &result.trace {
        let mut row = vec![
            rec.k.to_string(),
            rec.evaluations.to_string(),
            rec.feasible_rows.to_string(),
            rec.candidates.to_string(),
            fmt_num(rec.best_scalarized),
            fmt_num(rec.alpha),
            opt_num(rec.max_ei),
            opt_num(rec.pick_mu.first().copied()),
            opt_num(rec.pick_sigma.first().copied()),
            rec.stop.map(|s| s.tag().to_string()).unwrap_or_default(),
        ];
        for (i, s) in rec.objectives.iter().enumerate() {
            row.push(fmt_num(s.utopia.value));
            row.extend(s.utopia.design.iter().map(|v| if v.is_nan() { String::new() } else { fmt_num(*v) }));
            row.push(s.utopia.model.map(|m| m.tag().to_string()).unwrap_or_else(|| "fixed".into()));
            row.push(s.fallback.to_string());
            row.push(s.bmlr_flagged.to_string());
            row.extend(rec.theta[i].iter().map(|v| fmt_num(*v)));
        }
        let pick = rec.picked.first();
        row.extend((0..dims).map(|m| opt_num(pick.map(|p| p[m]))));
        let pick_y = rec.picked_objectives.first();
        row.extend((0..n_obj).map(|i| opt_num(pick_y.map(|p| p[i]))));
        for s in &rec.objectives {
            for kind in SCORED_KINDS {
                match s.scores.iter().find(|m| m.kind == kind) {
                    Some(m) => row.extend([fmt_num(m.e1), fmt_num(m.e2), fmt_num(m.combined)]),
                    None => row.extend([String::new(), String::new(), String::new()]),
                }
            }
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Every evaluated row with the iteration that added it.
pub fn write_samples_csv<W: Write>(result: &RunResult, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let dims = result.final_solution.design.len();
    let n_obj = result.weight.len();
    let header: Vec<String> = std::iter::once("iteration".to_string())
        .chain((1..=dims).map(|m| format!("x{m}")))
        .chain((1..=n_obj).map(|i| format!("y{i}")))
        .chain(std::iter::once("feasible".to_string()))
        .collect();
    wtr.write_record(&header)?;
    for (r, it) in result.data.rows().iter().zip(&result.row_iteration) {
        let rec: Vec<String> = std::iter::once(it.to_string())
            .chain(r.design.iter().chain(&r.objectives).map(|v| fmt_num(*v)))
            .chain(std::iter::once(r.feasible.to_string()))
            .collect();
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// JSON number rounded to the output precision; non-finite values become null.
pub fn json_num(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::Value::from(fmt_num(v).parse::<f64>().expect("formatted float parses"))
    } else {
        serde_json::Value::Null
    }
}

fn json_vec(v: &[f64]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(|x| json_num(*x)).collect())
}

/// Run summary. Wall-clock time is deliberately omitted so reruns are
/// byte-identical.
pub fn summary_json(result: &RunResult) -> serde_json::Value {
    let last = result.trace.last().expect("trace has at least one record");
    let selections: Vec<serde_json::Value> = (0..result.weight.len())
        .map(|i| {
            let mut counts = std::collections::BTreeMap::new();
            for rec in &result.trace {
                let tag = rec.objectives[i].utopia.model.map(|m| m.tag()).unwrap_or("fixed");
                *counts.entry(tag.to_string()).or_insert(0usize) += 1;
            }
            serde_json::json!(counts)
        })
        .collect();
    serde_json::json!({
        "problem": result.problem,
        "architecture": result.architecture.tag(),
        "weight": json_vec(&result.weight),
        "seed": result.seed,
        "evaluations": result.evaluations,
        "iterations": result.trace.len(),
        "stop": result.stop.tag(),
        "final": {
            "design": json_vec(&result.final_solution.design),
            "objectives": json_vec(&result.final_solution.objectives),
            "scalarized": json_num(result.final_solution.scalarized),
        },
        "utopia": {
            "values": json_vec(&result.final_solution.utopia),
            "designs": last.objectives.iter().map(|s| json_vec(&s.utopia.design)).collect::<Vec<_>>(),
            "models": last.objectives.iter().map(|s| s.utopia.model.map(|m| m.tag()).unwrap_or("fixed")).collect::<Vec<_>>(),
        },
        "selections": selections,
    })
}
