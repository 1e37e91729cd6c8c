//! Risk/cost trade-off for the tube under the chance constraint, one weight.

use tcheby_mobo::acquisition::WeightVector;
use tcheby_mobo::driver::{run_mobo, Architecture, RunConfig};
use tcheby_mobo::problems::{ThinTube, TubeConfig};
use tcheby_mobo::selection::CvConfig;

fn main() -> tcheby_mobo::Result<()> {
    let tube = ThinTube::new(TubeConfig { steps: vec![11, 11, 11], ..TubeConfig::default() })?;
    let grid = tube.grid()?;
    let cfg = RunConfig {
        budget: 40,
        n0: 15,
        architecture: Architecture::C,
        seed: 3,
        cv: CvConfig { repeats: 20, ..CvConfig::default() },
        ..RunConfig::default()
    };
    let r = run_mobo(&tube, &grid, &WeightVector::pair(0.5)?, &cfg)?;
    for t in &r.trace {
        println!("k={:>2} candidates {:>4} feasible rows {:>3} best {:.5}", t.k, t.candidates, t.feasible_rows, t.best_scalarized);
    }
    let f = &r.final_solution;
    println!(
        "\n{} evaluations; R={:.4} L={:.3} t={:.5}: risk {:.4}, cost {:.5}",
        r.evaluations, f.design[0], f.design[1], f.design[2], f.objectives[0], f.objectives[1]
    );
    Ok(())
}
