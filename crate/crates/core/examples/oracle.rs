//! Exhaustive search on the benchmark grid: true utopia and the Pareto point
//! each weight selects.

use tcheby_mobo::driver::standard_weights;
use tcheby_mobo::evaluation::exhaustive_oracle;
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig};

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig::default())?;
    let oracle = exhaustive_oracle(&Benchmark, &grid, &standard_weights())?;
    println!("{} grid points", grid.len());
    for (i, (u, x)) in oracle.utopia.iter().zip(&oracle.utopia_designs).enumerate() {
        println!("objective {}: max {u:.6} at {x:?}", i + 1);
    }
    println!("\n  w1   x1     x2      camelback   -ackley    scalarized");
    for p in &oracle.pareto {
        println!(
            "{:>5.1} {:>6.2} {:>6.2} {:>11.4} {:>9.4} {:>10.4}",
            p.weight[0], p.design[0], p.design[1], p.objectives[0], p.objectives[1], p.scalarized
        );
    }
    Ok(())
}
