//! All six architectures against the oracle on a coarse benchmark grid:
//! norms, evaluation counts and scores.

use tcheby_mobo::driver::{standard_weights, Architecture, RunConfig};
use tcheby_mobo::evaluation::compare_architectures;
use tcheby_mobo::portfolio::BmlrConfig;
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig};
use tcheby_mobo::selection::CvConfig;

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() })?;
    let cfg = RunConfig {
        budget: 30,
        seed: 8,
        cv: CvConfig { repeats: 10, ..CvConfig::default() },
        bmlr: BmlrConfig { chains: 2, warmup_per_chain: 200, max_iter_per_chain: 1200, ..BmlrConfig::default() },
        ..RunConfig::default()
    };
    let cmp = compare_architectures(&Benchmark, &grid, &Architecture::ALL, &standard_weights(), &cfg)?;
    println!("arch  utopia norm (sd)      evals    pareto norm (sd)");
    for c in &cmp.cells {
        match &c.metrics {
            Some(m) => println!(
                "{:<4} {:>8.3} ({:>7.3}) {:>8.1} {:>9.3} ({:>7.3})",
                c.architecture, m.utopia.mean, m.utopia.std_dev, m.evaluations.mean, m.pareto.mean, m.pareto.std_dev
            ),
            None => println!("{:<4} all runs failed", c.architecture),
        }
    }
    println!();
    for (name, s) in &cmp.scores.criteria {
        let row: Vec<String> = s.scores.iter().map(|v| format!("{v:>6.1}")).collect();
        println!("{name:<12} {}", row.join(" "));
    }
    let totals: Vec<String> = cmp.scores.totals.iter().map(|v| format!("{v:>6.1}")).collect();
    println!("{:<12} {}", "total", totals.join(" "));
    Ok(())
}
