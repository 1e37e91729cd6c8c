//! Exhaustive-search oracle, Euclidean-norm metrics and architecture scoring.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::acquisition::{tchebycheff, WeightVector};
use crate::design_space::{DesignGrid, Row};
use crate::driver::{run_weight_sweep, Architecture, RunConfig, RunResult};
use crate::error::{Error, Result};
use crate::numfmt::fmt_num;
use crate::problems::Problem;
use crate::selection::Sense;

/// `a` dominates `b`: no worse in every objective and better in one.
pub fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strict = false;
    for ((x, y), s) in a.iter().zip(b).zip(senses) {
        if s.better(*y, *x) {
            return false;
        }
        if s.better(*x, *y) {
            strict = true;
        }
    }
    strict
}

/// Evaluates every grid point, in grid order.
pub fn evaluate_grid(problem: &dyn Problem, grid: &DesignGrid) -> Result<Vec<Row>> {
    grid.points()
        .into_par_iter()
        .map(|x| {
            let y = problem.evaluate(&x)?;
            let feasible = problem.is_feasible(&x, &y);
            Ok(Row { design: x, objectives: y, feasible })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OraclePoint {
    pub weight: Vec<f64>,
    pub design: Vec<f64>,
    pub objectives: Vec<f64>,
    pub scalarized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub senses: Vec<Sense>,
    pub utopia: Vec<f64>,
    pub utopia_designs: Vec<Vec<f64>>,
    pub pareto: Vec<OraclePoint>,
}

/// Oracle over pre-evaluated rows. The utopia is the per-objective optimum
/// over feasible rows (first row wins ties). For each weight the Pareto point
/// minimizes the scalarization; ties go to the smaller L1 distance to the
/// utopia, then to the earlier row, which keeps the pick non-dominated.
pub fn oracle_from_rows(rows: &[Row], senses: &[Sense], weights: &[WeightVector]) -> Result<OracleResult> {
    let feasible: Vec<&Row> = rows.iter().filter(|r| r.feasible).collect();
    if feasible.is_empty() {
        return Err(Error::EmptyOracle);
    }
    let mut utopia = Vec::with_capacity(senses.len());
    let mut utopia_designs = Vec::with_capacity(senses.len());
    for (i, s) in senses.iter().enumerate() {
        let mut best = feasible[0];
        for r in &feasible {
            if s.better(r.objectives[i], best.objectives[i]) {
                best = r;
            }
        }
        utopia.push(best.objectives[i]);
        utopia_designs.push(best.design.clone());
    }
    let pareto = weights
        .iter()
        .map(|w| {
            let mut best: Option<(f64, f64, &Row)> = None;
            for r in &feasible {
                let v = tchebycheff(&r.objectives, &utopia, w.as_slice())?.0;
                let l1: f64 = r.objectives.iter().zip(&utopia).map(|(y, u)| (y - u).abs()).sum();
                if best.is_none_or(|(bv, bl, _)| v < bv || (v == bv && l1 < bl)) {
                    best = Some((v, l1, r));
                }
            }
            let (v, _, r) = best.expect("feasible rows exist");
            Ok(OraclePoint { weight: w.as_slice().to_vec(), design: r.design.clone(), objectives: r.objectives.clone(), scalarized: v })
        })
        .collect::<Result<_>>()?;
    Ok(OracleResult { senses: senses.to_vec(), utopia, utopia_designs, pareto })
}

pub fn exhaustive_oracle(problem: &dyn Problem, grid: &DesignGrid, weights: &[WeightVector]) -> Result<OracleResult> {
    oracle_from_rows(&evaluate_grid(problem, grid)?, &problem.senses(), weights)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Mean, sample standard deviation and standard error of the mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self { mean: f64::NAN, std_dev: f64::NAN, std_error: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n;
        let std_dev =
            if values.len() > 1 { (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
        Self { mean, std_dev, std_error: std_dev / n.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMetrics {
    pub weight: Vec<f64>,
    pub utopia_norm: f64,
    pub pareto_norm: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub utopia: Summary,
    pub pareto: Summary,
    pub evaluations: Summary,
    pub per_weight: Vec<WeightMetrics>,
}

/// Objective-space norms of each run's final utopia and final solution from
/// the oracle's, aggregated over weights.
pub fn euclidean_norm_metrics(runs: &[RunResult], oracle: &OracleResult) -> Result<MetricsReport> {
    let mut per_weight = Vec::with_capacity(runs.len());
    for run in runs {
        let p = oracle
            .pareto
            .iter()
            .find(|p| p.weight.iter().zip(&run.weight).all(|(a, b)| (a - b).abs() <= 1e-12))
            .ok_or_else(|| Error::Alignment(format!("no oracle point for weight {:?}", run.weight)))?;
        per_weight.push(WeightMetrics {
            weight: run.weight.clone(),
            utopia_norm: euclid(run.final_utopia(), &oracle.utopia),
            pareto_norm: euclid(&run.final_solution.objectives, &p.objectives),
            evaluations: run.evaluations,
        });
    }
    Ok(MetricsReport {
        utopia: Summary::of(&per_weight.iter().map(|m| m.utopia_norm).collect::<Vec<_>>()),
        pareto: Summary::of(&per_weight.iter().map(|m| m.pareto_norm).collect::<Vec<_>>()),
        evaluations: Summary::of(&per_weight.iter().map(|m| m.evaluations as f64).collect::<Vec<_>>()),
        per_weight,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scores {
    pub scores: Vec<f64>,
    /// All values were equal, so every entry scored 100.
    pub degenerate: bool,
}

/// `100 - (x - min) / (max - min) * 100`; lower metrics score higher.
pub fn score(values: &[f64]) -> Scores {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Scores { scores: vec![100.0; values.len()], degenerate: true };
    }
    Scores { scores: values.iter().map(|x| 100.0 - (x - lo) / (hi - lo) * 100.0).collect(), degenerate: false }
}

/// Per-architecture scores on utopia norm, evaluation count and Pareto norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable {
    pub architectures: Vec<Architecture>,
    pub criteria: Vec<(String, Scores)>,
    pub totals: Vec<f64>,
}

#[derive(Debug)]
pub struct ArchitectureRuns {
    pub architecture: Architecture,
    pub runs: Vec<RunResult>,
    /// `(weight, message)` of runs that failed.
    pub failures: Vec<(Vec<f64>, String)>,
    pub metrics: Option<MetricsReport>,
}

#[derive(Debug)]
pub struct Comparison {
    pub oracle: OracleResult,
    pub cells: Vec<ArchitectureRuns>,
    pub scores: ScoreTable,
}

pub fn score_table(cells: &[(Architecture, &MetricsReport)]) -> ScoreTable {
    let col = |f: &dyn Fn(&MetricsReport) -> f64| cells.iter().map(|(_, m)| f(m)).collect::<Vec<_>>();
    let criteria = vec![
        ("utopia_norm".to_string(), score(&col(&|m| m.utopia.mean))),
        ("evaluations".to_string(), score(&col(&|m| m.evaluations.mean))),
        ("pareto_norm".to_string(), score(&col(&|m| m.pareto.mean))),
    ];
    let totals = (0..cells.len()).map(|j| criteria.iter().map(|(_, s)| s.scores[j]).sum()).collect();
    ScoreTable { architectures: cells.iter().map(|(a, _)| *a).collect(), criteria, totals }
}

/// Runs each architecture over the weight sweep with shared seeds and scores
/// them against the oracle. Failed runs are recorded and left out of the
/// metrics.
pub fn compare_architectures(
    problem: &dyn Problem,
    grid: &DesignGrid,
    architectures: &[Architecture],
    weights: &[WeightVector],
    cfg: &RunConfig,
) -> Result<Comparison> {
    if architectures.is_empty() || weights.is_empty() {
        return Err(Error::Configuration("compare needs at least one architecture and one weight".into()));
    }
    let oracle = exhaustive_oracle(problem, grid, weights)?;
    let mut cells = Vec::with_capacity(architectures.len());
    for &arch in architectures {
        let run_cfg = RunConfig { architecture: arch, ..cfg.clone() };
        let mut runs = Vec::new();
        let mut failures = Vec::new();
        for (w, r) in weights.iter().zip(run_weight_sweep(problem, grid, weights, &run_cfg)) {
            match r {
                Ok(run) => runs.push(run),
                Err(e) => {
                    log::warn!("architecture {arch}: {e}");
                    failures.push((w.as_slice().to_vec(), e.to_string()));
                }
            }
        }
        let metrics = if runs.is_empty() { None } else { Some(euclidean_norm_metrics(&runs, &oracle)?) };
        cells.push(ArchitectureRuns { architecture: arch, runs, failures, metrics });
    }
    let scored: Vec<(Architecture, &MetricsReport)> =
        cells.iter().filter_map(|c| c.metrics.as_ref().map(|m| (c.architecture, m))).collect();
    let scores = score_table(&scored);
    Ok(Comparison { oracle, cells, scores })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// `objective,sense,value,x1..xd`.
pub fn write_utopia_csv<W: Write>(oracle: &OracleResult, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let dims = oracle.utopia_designs.first().map_or(0, Vec::len);
    let header: Vec<String> =
        ["objective", "sense", "value"].iter().map(|s| s.to_string()).chain((1..=dims).map(|m| format!("x{m}"))).collect();
    wtr.write_record(&header)?;
    for (i, (v, d)) in oracle.utopia.iter().zip(&oracle.utopia_designs).enumerate() {
        let sense = if oracle.senses[i] == Sense::Min { "min" } else { "max" };
        let rec: Vec<String> =
            [(i + 1).to_string(), sense.to_string(), fmt_num(*v)].into_iter().chain(d.iter().map(|x| fmt_num(*x))).collect();
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `w1..wN,x1..xd,y1..yN,scalarized`, one row per weight.
pub fn write_pareto_csv<W: Write>(oracle: &OracleResult, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let n = oracle.utopia.len();
    let dims = oracle.utopia_designs.first().map_or(0, Vec::len);
    let header: Vec<String> = (1..=n)
        .map(|i| format!("w{i}"))
        .chain((1..=dims).map(|m| format!("x{m}")))
        .chain((1..=n).map(|i| format!("y{i}")))
        .chain(std::iter::once("scalarized".to_string()))
        .collect();
    wtr.write_record(&header)?;
    for p in &oracle.pareto {
        let rec: Vec<String> = p
            .weight
            .iter()
            .chain(&p.design)
            .chain(&p.objectives)
            .chain(std::iter::once(&p.scalarized))
            .map(|v| fmt_num(*v))
            .collect();
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Metric rows by architecture columns.
pub fn write_metrics_csv<W: Write>(cmp: &Comparison, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let cells: Vec<&ArchitectureRuns> = cmp.cells.iter().collect();
    let header: Vec<String> = std::iter::once("metric".to_string()).chain(cells.iter().map(|c| c.architecture.to_string())).collect();
    wtr.write_record(&header)?;
    let rows: [(&str, fn(&MetricsReport) -> f64); 9] = [
        ("utopia_norm_mean", |m| m.utopia.mean),
        ("utopia_norm_std_dev", |m| m.utopia.std_dev),
        ("utopia_norm_std_error", |m| m.utopia.std_error),
        ("evaluations_mean", |m| m.evaluations.mean),
        ("evaluations_std_dev", |m| m.evaluations.std_dev),
        ("evaluations_std_error", |m| m.evaluations.std_error),
        ("pareto_norm_mean", |m| m.pareto.mean),
        ("pareto_norm_std_dev", |m| m.pareto.std_dev),
        ("pareto_norm_std_error", |m| m.pareto.std_error),
    ];
    for (label, f) in rows {
        let rec: Vec<String> = std::iter::once(label.to_string())
            .chain(cells.iter().map(|c| c.metrics.as_ref().map(|m| fmt_num(f(m))).unwrap_or_default()))
            .collect();
        wtr.write_record(&rec)?;
    }
    let failed: Vec<String> =
        std::iter::once("failed_runs".to_string()).chain(cells.iter().map(|c| c.failures.len().to_string())).collect();
    wtr.write_record(&failed)?;
    wtr.flush()?;
    Ok(())
}

/// Criterion rows by architecture columns, plus totals.
pub fn write_scores_csv<W: Write>(table: &ScoreTable, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let header: Vec<String> =
        std::iter::once("criterion".to_string()).chain(table.architectures.iter().map(|a| a.to_string())).collect();
    wtr.write_record(&header)?;
    for (name, s) in &table.criteria {
        let rec: Vec<String> = std::iter::once(name.clone()).chain(s.scores.iter().map(|v| fmt_num(*v))).collect();
        wtr.write_record(&rec)?;
    }
    let total: Vec<String> = std::iter::once("total".to_string()).chain(table.totals.iter().map(|v| fmt_num(*v))).collect();
    wtr.write_record(&total)?;
    wtr.flush()?;
    Ok(())
}

/// `criterion,degenerate`: criteria whose values were all equal.
pub fn write_score_flags_csv<W: Write>(table: &ScoreTable, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(["criterion", "degenerate"])?;
    for (name, s) in &table.criteria {
        wtr.write_record([name.as_str(), if s.degenerate { "true" } else { "false" }])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-weight norms and evaluation counts for every architecture.
pub fn write_per_weight_csv<W: Write>(cmp: &Comparison, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    let n = cmp.oracle.utopia.len();
    let header: Vec<String> = std::iter::once("architecture".to_string())
        .chain((1..=n).map(|i| format!("w{i}")))
        .chain(["utopia_norm", "pareto_norm", "evaluations"].iter().map(|s| s.to_string()))
        .collect();
    wtr.write_record(&header)?;
    for c in &cmp.cells {
        if let Some(m) = &c.metrics {
            for pw in &m.per_weight {
                let rec: Vec<String> = std::iter::once(c.architecture.to_string())
                    .chain(pw.weight.iter().map(|v| fmt_num(*v)))
                    .chain([fmt_num(pw.utopia_norm), fmt_num(pw.pareto_norm), pw.evaluations.to_string()])
                    .collect();
                wtr.write_record(&rec)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}
