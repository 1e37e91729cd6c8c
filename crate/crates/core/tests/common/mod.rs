#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use tcheby_mobo::design_space::DesignGrid;
use tcheby_mobo::driver::RunConfig;
use tcheby_mobo::portfolio::BmlrConfig;
use tcheby_mobo::problems::{Benchmark, BenchmarkConfig};
use tcheby_mobo::selection::CvConfig;

/// Benchmark grid at 0.2 spacing. Still contains (3, 2), still without the
/// axes.
pub fn coarse_benchmark() -> (BenchmarkConfig, DesignGrid) {
    let cfg = BenchmarkConfig { steps: vec![31, 21], ..BenchmarkConfig::default() };
    let grid = Benchmark::grid(&cfg).unwrap();
    (cfg, grid)
}

/// Run settings cheap enough for sweeps in tests.
pub fn light_config(budget: usize, seed: u64) -> RunConfig {
    RunConfig {
        budget,
        n0: 10,
        seed,
        cv: CvConfig { repeats: 10, ..CvConfig::default() },
        bmlr: BmlrConfig { chains: 2, warmup_per_chain: 200, max_iter_per_chain: 1200, ..BmlrConfig::default() },
        ..RunConfig::default()
    }
}

/// `1/2 b'Kb + eps * sum|b| - y'b`.
pub fn svr_dual_objective(k: &DMatrix<f64>, y: &[f64], eps: f64, beta: &[f64]) -> f64 {
    let b = DVector::from_column_slice(beta);
    0.5 * (b.transpose() * k * &b)[(0, 0)] + eps * beta.iter().map(|v| v.abs()).sum::<f64>()
        - y.iter().zip(beta).map(|(a, c)| a * c).sum::<f64>()
}

/// Exact minimizer of the epsilon-SVR dual by enumerating, per row, one of
/// five states: zero, at +C, at -C, free positive, free negative. Each
/// pattern fixes the signs, leaving an equality-constrained quadratic solved
/// through its KKT system. Needs a positive definite `k`; 5^n patterns, so
/// keep `n` small.
pub fn svr_qp_oracle(k: &DMatrix<f64>, y: &[f64], c: f64, eps: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut t = code;
        for s in state.iter_mut() {
            *s = (t % 5) as u8;
            t /= 5;
        }
        let mut beta = vec![0.0; n];
        let mut free = Vec::new();
        let mut signs = Vec::new();
        for (i, s) in state.iter().enumerate() {
            match s {
                1 => beta[i] = c,
                2 => beta[i] = -c,
                3 => {
                    free.push(i);
                    signs.push(1.0)
                }
                4 => {
                    free.push(i);
                    signs.push(-1.0)
                }
                _ => {}
            }
        }
        let m = free.len();
        let mut a = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (q, &j) in free.iter().enumerate() {
                a[(r, q)] = k[(i, j)];
            }
            a[(r, m)] = 1.0;
            a[(m, r)] = 1.0;
            let fixed: f64 = (0..n).filter(|j| !free.contains(j)).map(|j| k[(i, j)] * beta[j]).sum();
            rhs[r] = y[i] - eps * signs[r] - fixed;
        }
        rhs[m] = -(0..n).filter(|j| !free.contains(j)).map(|j| beta[j]).sum::<f64>();
        if m == 0 {
            if rhs[0].abs() > 1e-12 {
                continue;
            }
        } else {
            let Some(sol) = a.lu().solve(&rhs) else { continue };
            let mut ok = true;
            for (r, &i) in free.iter().enumerate() {
                let v = sol[r];
                if v * signs[r] < -1e-12 || v.abs() > c + 1e-12 {
                    ok = false;
                }
                beta[i] = v;
            }
            if !ok {
                continue;
            }
        }
        let obj = svr_dual_objective(k, y, eps, &beta);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, beta));
        }
    }
    best.expect("the all-zero pattern is always feasible")
}

/// Ordinary least squares through the normal equations.
pub fn ols(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let p = x[0].len() + 1;
    let a = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let b = DVector::from_column_slice(y);
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    ata.cholesky().expect("full rank design").solve(&atb).iter().copied().collect()
}

/// Monte-Carlo estimate of `E[max(best - Y, 0)]`, `Y ~ N(mu, sigma^2)`.
pub fn mc_expected_improvement(mu: f64, sigma: f64, best: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..samples {
        let z: f64 = StandardNormal.sample(&mut rng);
        acc += (best - (mu + sigma * z)).max(0.0);
    }
    acc / samples as f64
}

/// Direct transcription of the Bree region rules.
pub fn bree_rule(x: f64, y: f64) -> &'static str {
    if x + y <= 1.0 {
        "elastic"
    } else if x * y > 1.0 {
        "ratcheting"
    } else if y > 2.0 {
        "plastic"
    } else {
        "shakedown"
    }
}
