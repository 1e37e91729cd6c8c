//! The eleven-weight sweep with architecture C; one line per weight.

use tcheby_mobo::driver::{run_weight_sweep, standard_weights, RunConfig};
use tcheby_mobo::portfolio::BmlrConfig;
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig};
use tcheby_mobo::selection::CvConfig;

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() })?;
    let cfg = RunConfig {
        budget: 40,
        seed: 2024,
        cv: CvConfig { repeats: 10, ..CvConfig::default() },
        bmlr: BmlrConfig { chains: 2, warmup_per_chain: 200, max_iter_per_chain: 1200, ..BmlrConfig::default() },
        ..RunConfig::default()
    };
    println!("  w1  evals  stop       design          objectives");
    for r in run_weight_sweep(&Benchmark, &grid, &standard_weights(), &cfg) {
        let r = r?;
        let f = &r.final_solution;
        println!(
            "{:>4.1} {:>6}  {:<9} ({:>5.2}, {:>5.2})  ({:.4}, {:.4})",
            r.weight[0],
            r.evaluations,
            r.stop.tag(),
            f.design[0],
            f.design[1],
            f.objectives[0],
            f.objectives[1]
        );
    }
    Ok(())
}
