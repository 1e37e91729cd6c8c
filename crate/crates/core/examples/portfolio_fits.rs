//! Every portfolio member fitted to the same sample, compared on held-out
//! grid points.

use tcheby_mobo::design_space::{initial_doe, Row, TrainingSet};
use tcheby_mobo::portfolio::{fit_model, Dataset, ModelKind, ModelSettings, SvrKernel};
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig, Problem};

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() })?;
    let rows = initial_doe(&grid, 30, 7)?
        .into_iter()
        .map(|x| {
            let y = Benchmark.evaluate(&x)?;
            Ok(Row { design: x, objectives: y, feasible: true })
        })
        .collect::<tcheby_mobo::Result<Vec<_>>>()?;
    let data = TrainingSet::from_rows(2, rows)?;
    let settings = ModelSettings::default();
    let test: Vec<Vec<f64>> = grid.points().into_iter().step_by(7).filter(|p| !data.contains(p)).collect();
    for i in 0..2 {
        let d = Dataset::from_training(&data, i);
        println!("objective {}", i + 1);
        let mut kinds = ModelKind::full_portfolio(SvrKernel::Gaussian);
        kinds.push(ModelKind::Svmr(SvrKernel::Linear));
        for kind in kinds {
            match fit_model(kind, &d, &settings, None, 1) {
                Ok(model) => {
                    let rmse = (test
                        .iter()
                        .map(|p| (model.predict(p).unwrap() - Benchmark.evaluate(p).unwrap()[i]).powi(2))
                        .sum::<f64>()
                        / test.len() as f64)
                        .sqrt();
                    println!("  {:<14} held-out rmse {rmse:>10.4}", kind.tag());
                }
                Err(e) => println!("  {:<14} not fitted: {e}", kind.tag()),
            }
        }
    }
    Ok(())
}
