//! Grid construction with excluded axis values and a seeded initial design.

use tcheby_mobo::design_space::{initial_doe, DesignGrid};

fn main() -> tcheby_mobo::Result<()> {
    let grid = DesignGrid::new(&[(-3.0, 3.0), (-2.0, 2.0)], &[13, 9], &[vec![0.0], vec![0.0]])?;
    println!("{} points, axes {:?}", grid.len(), grid.axes());
    let doe = initial_doe(&grid, 8, 42)?;
    // Excluded axis values are already absent from the axes.
    for &y in grid.axes()[1].iter().rev() {
        let line: String =
            grid.axes()[0].iter().map(|&x| if doe.iter().any(|p| p[0] == x && p[1] == y) { " X" } else { " o" }).collect();
        println!("{y:>5.1} {line}");
    }
    Ok(())
}
