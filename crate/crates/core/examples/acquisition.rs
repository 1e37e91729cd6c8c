//! Tchebycheff scalarization and expected improvement on a fitted pair of
//! surrogates; a batch of three picked with the kriging believer.

use tcheby_mobo::acquisition::{select_batch, tchebycheff, AcquisitionConfig, Surrogates, WeightVector};
use tcheby_mobo::design_space::initial_doe;
use tcheby_mobo::gp::{fit_gp, GpConfig};
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig, Problem};

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() })?;
    let x = initial_doe(&grid, 15, 11)?;
    let y: Vec<Vec<f64>> = (0..2).map(|i| x.iter().map(|p| Benchmark.evaluate(p).unwrap()[i]).collect()).collect();
    let gp = GpConfig::default();
    let fits = y.iter().map(|col| fit_gp(&x, col, &gp)).collect::<tcheby_mobo::Result<Vec<_>>>()?;
    let utopia = [162.9, -0.3];
    let w = WeightVector::pair(0.5)?;
    let best = x
        .iter()
        .enumerate()
        .map(|(j, _)| tchebycheff(&[y[0][j], y[1][j]], &utopia, w.as_slice()).unwrap().0)
        .fold(f64::INFINITY, f64::min);
    println!("best scalarized value in the sample: {best:.4}");
    let candidates: Vec<Vec<f64>> = grid.points().into_iter().filter(|p| !x.contains(p)).collect();
    let cfg = AcquisitionConfig { batch_size: 3, ..AcquisitionConfig::default() };
    let surrogates = Surrogates { fits, x: &x, y, gp: &gp };
    let batch = select_batch(&surrogates, &candidates, &utopia, &w, best, 1e-6, &cfg, 0)?;
    for (i, d) in batch.designs.iter().enumerate() {
        println!("pick {}: {d:?}  EI {:.4}  mean {:.4}  sd {:.4}", i + 1, batch.max_ei[i], batch.mu[i], batch.sigma[i]);
    }
    Ok(())
}
