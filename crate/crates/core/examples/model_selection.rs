//! One utopia-estimation step: cross-validated criteria for every portfolio
//! member and the model each selection mode picks.

use tcheby_mobo::design_space::initial_doe;
use tcheby_mobo::portfolio::{portfolio_for, BmlrConfig, Dataset, ModelKind, ModelSettings, SvrKernel};
use tcheby_mobo::problems::{camelback, Benchmark, BenchmarkConfig};
use tcheby_mobo::selection::{score_portfolio, select_model, CvConfig, SelectionMode, Sense};

fn main() -> tcheby_mobo::Result<()> {
    let grid = Benchmark::grid(&BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() })?;
    let x = initial_doe(&grid, 20, 3)?;
    let y = x.iter().map(|p| camelback(p[0], p[1])).collect();
    let data = Dataset { x, y };
    let candidates: Vec<Vec<f64>> = grid.points().into_iter().filter(|p| !data.x.contains(p)).collect();
    let settings = ModelSettings {
        bmlr: BmlrConfig { chains: 2, warmup_per_chain: 200, max_iter_per_chain: 1200, ..BmlrConfig::default() },
        ..ModelSettings::default()
    };
    let cv = CvConfig { repeats: 20, seed: 5, ..CvConfig::default() };
    let kinds = portfolio_for(&ModelKind::full_portfolio(SvrKernel::Gaussian), &data)?;
    let cands = score_portfolio(&data, &kinds, &candidates, Sense::Max, &settings, None, &cv)?;
    let mut scores: Vec<_> = cands.iter().map(|c| c.score.clone()).collect();
    let both = select_model(&mut scores, SelectionMode::Both, cv.criterion1_weight)?;
    println!("model            E1        E2      combined   utopia estimate");
    for (s, c) in scores.iter().zip(&cands) {
        let est = c.estimate.as_ref().map_or("-".to_string(), |e| format!("{:.3} at {:?}", e.value, e.design));
        println!("{:<14} {:>8.3} {:>9.3} {:>9.3}   {est}", s.kind.tag(), s.e1, s.e2, s.combined);
    }
    let one = select_model(&mut scores, SelectionMode::Crit1, 0.5)?;
    let two = select_model(&mut scores, SelectionMode::Crit2, 0.5)?;
    println!("\ncriterion 1 picks {}, criterion 2 picks {}, combined picks {}", scores[one].kind, scores[two].kind, scores[both].kind);
    Ok(())
}
