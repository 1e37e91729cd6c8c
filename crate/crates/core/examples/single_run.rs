//! One optimization run for w = (0.5, 0.5), printing the per-iteration trace.

use tcheby_mobo::acquisition::WeightVector;
use tcheby_mobo::driver::{run_mobo, RunConfig};
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig};
use tcheby_mobo::selection::CvConfig;

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() })?;
    let cfg = RunConfig { budget: 30, seed: 1, cv: CvConfig { repeats: 20, ..CvConfig::default() }, ..RunConfig::default() };
    let r = run_mobo(&Benchmark, &grid, &WeightVector::pair(0.5)?, &cfg)?;
    println!("  k evals  utopia (model)                        best      max EI    pick");
    for t in &r.trace {
        let u: Vec<String> = t
            .objectives
            .iter()
            .map(|s| format!("{:.3} ({})", s.utopia.value, s.utopia.model.map_or("fixed", |m| m.tag())))
            .collect();
        println!(
            "{:>3} {:>5}  {:<36} {:>8.4} {:>10} {:?}",
            t.k,
            t.evaluations,
            u.join(", "),
            t.best_scalarized,
            t.max_ei.map_or("-".into(), |v| format!("{v:.2e}")),
            t.picked.first()
        );
    }
    let f = &r.final_solution;
    println!("\nstopped: {}; final {:?} -> {:?}, scalarized {:.4}", r.stop.tag(), f.design, f.objectives, f.scalarized);
    Ok(())
}
