//! Bree regions, risk and cost across the thin-walled tube grid.

use std::collections::BTreeMap;

use tcheby_mobo::problems::{bree_region, bree_risk, tube_bree_state, tube_constraints, tube_cost, ThinTube, TubeConfig};

fn main() -> tcheby_mobo::Result<()> {
    for (x, y) in [(0.4, 0.4), (0.8, 0.8), (1.5, 1.5), (0.3, 2.5), (0.5, 2.0), (2.0, 0.5)] {
        let s = bree_region(x, y)?;
        println!("({x:.1}, {y:.1}) {:<10} risk {:.4}", format!("{:?}", s.region), bree_risk(&s));
    }
    let tube = ThinTube::new(TubeConfig::default())?;
    let mut regions = BTreeMap::new();
    let mut feasible = 0;
    for p in tube.grid()?.points() {
        let s = tube_bree_state(p[0], p[1], p[2], &tube.config)?;
        *regions.entry(format!("{:?}", s.region)).or_insert(0) += 1;
        if tube_constraints(p[0], p[1], p[2], &tube.config)?.all() {
            feasible += 1;
        }
    }
    println!("\ntube grid regions {regions:?}, {feasible} points pass the deterministic constraints");
    let (r, l, t) = (0.01, 0.5, 0.001);
    let s = tube_bree_state(r, l, t, &tube.config)?;
    println!(
        "R={r} L={l} t={t}: Bree ({:.3}, {:.3}) {:?}, risk {:.4}, cost {:.4}",
        s.x,
        s.y,
        s.region,
        bree_risk(&s),
        tube_cost(r, l, t, &tube.config)?
    );
    Ok(())
}
