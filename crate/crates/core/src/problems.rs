//! The two case studies: a 2-D benchmark pair and a thin tube under cyclic
//! pressure and temperature loading.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::acquisition::normal_cdf;
use crate::design_space::DesignGrid;
use crate::error::{Error, Result};
use crate::selection::Sense;

/// A multi-objective problem defined on a design grid.
pub trait Problem: Sync {
    fn name(&self) -> &str;

    fn senses(&self) -> Vec<Sense>;

    fn n_objectives(&self) -> usize {
        self.senses().len()
    }

    /// The expensive evaluation.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Cheap constraints known in closed form.
    fn deterministic_feasible(&self, _x: &[f64]) -> bool {
        true
    }

    /// Feasibility of an evaluated design, used to flag training rows.
    fn is_feasible(&self, x: &[f64], _y: &[f64]) -> bool {
        self.deterministic_feasible(x)
    }

    /// `(objective index, threshold, reliability)` of a chance constraint
    /// `P(y_i <= threshold) >= reliability` screened through the surrogate.
    fn chance_constraint(&self) -> Option<(usize, f64, f64)> {
        None
    }

    /// Fixed utopia used by the baseline architecture.
    fn fixed_utopia(&self) -> Vec<f64> {
        vec![0.0; self.n_objectives()]
    }
}

/// Six-hump camel back.
pub fn camelback(x1: f64, x2: f64) -> f64 {
    (4.0 - 2.1 * x1 * x1 + x1.powi(4) / 3.0) * x1 * x1 + x1 * x2 + (-4.0 + 4.0 * x2 * x2) * x2 * x2
}

pub const ACKLEY_A: f64 = 20.0;
pub const ACKLEY_B: f64 = 0.2;
pub const ACKLEY_C: f64 = 2.0 * PI;

/// Negated Ackley path function; 0 at the origin, negative elsewhere.
pub fn inv_ackley(x1: f64, x2: f64) -> f64 {
    let r = ((x1 * x1 + x2 * x2) / 2.0).sqrt();
    ACKLEY_A * (-ACKLEY_B * r).exp() + (((ACKLEY_C * x1).cos() + (ACKLEY_C * x2).cos()) / 2.0).exp() - ACKLEY_A - E
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub bounds: Vec<(f64, f64)>,
    pub steps: Vec<usize>,
    pub exclusions: Vec<Vec<f64>>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self { bounds: vec![(-3.0, 3.0), (-2.0, 2.0)], steps: vec![101, 101], exclusions: vec![vec![0.0], vec![0.0]] }
    }
}

/// Maximize camel back and inverted Ackley on a grid without the axes.
#[derive(Debug, Clone, Default)]
pub struct Benchmark;

impl Benchmark {
    pub fn grid(cfg: &BenchmarkConfig) -> Result<DesignGrid> {
        DesignGrid::new(&cfg.bounds, &cfg.steps, &cfg.exclusions)
    }
}

impl Problem for Benchmark {
    fn name(&self) -> &str {
        "benchmark"
    }

    fn senses(&self) -> Vec<Sense> {
        vec![Sense::Max, Sense::Max]
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != 2 {
            return Err(Error::Shape { expected: 2, got: x.len() });
        }
        Ok(vec![camelback(x[0], x[1]), inv_ackley(x[0], x[1])])
    }
}

/// Material, loading and grid of the tube problem. Lengths in m, stresses in
/// Pa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TubeConfig {
    /// Cost per kg.
    pub price: f64,
    pub density: f64,
    pub yield_stress: f64,
    pub youngs: f64,
    pub thermal_expansion: f64,
    pub poisson: f64,
    pub pressure: f64,
    pub delta_t: f64,
    pub axial_load: f64,
    pub aspect_limit: f64,
    pub reliability: f64,
    pub risk_threshold: f64,
    /// `(R, L, t)` ranges and point counts.
    pub bounds: Vec<(f64, f64)>,
    pub steps: Vec<usize>,
}

impl Default for TubeConfig {
    fn default() -> Self {
        Self {
            price: 2.0,
            density: 8000.0,
            yield_stress: 205e6,
            youngs: 207e9,
            thermal_expansion: 1.2e-5,
            poisson: 0.3,
            pressure: 5e6,
            delta_t: 70.0,
            axial_load: 1000.0,
            aspect_limit: 0.025,
            reliability: 0.99,
            risk_threshold: 0.5,
            bounds: vec![(0.005, 0.02), (0.2, 1.0), (0.0002, 0.002)],
            steps: vec![21, 21, 21],
        }
    }
}

impl TubeConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("price", self.price),
            ("density", self.density),
            ("yield_stress", self.yield_stress),
            ("youngs", self.youngs),
            ("thermal_expansion", self.thermal_expansion),
            ("pressure", self.pressure),
            ("delta_t", self.delta_t),
            ("axial_load", self.axial_load),
            ("aspect_limit", self.aspect_limit),
        ];
        for (k, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Configuration(format!("tube.{k} must be positive")));
            }
        }
        if !(self.poisson > 0.0 && self.poisson < 0.5) {
            return Err(Error::Configuration("tube.poisson must lie in (0, 0.5)".into()));
        }
        if !(self.reliability > 0.0 && self.reliability < 1.0) {
            return Err(Error::Configuration("tube.reliability must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

fn check_geometry(r: f64, l: f64, t: f64) -> Result<()> {
    if !(r > 0.0 && l > 0.0 && t > 0.0) {
        return Err(Error::Geometry(format!("R, L, t must be positive (R={r}, L={l}, t={t})")));
    }
    if t >= 2.0 * r {
        return Err(Error::Geometry(format!("wall thickness {t} must be below 2R = {}", 2.0 * r)));
    }
    Ok(())
}

/// Material cost `P rho pi t L (2R - t)`.
pub fn tube_cost(r: f64, l: f64, t: f64, cfg: &TubeConfig) -> Result<f64> {
    check_geometry(r, l, t)?;
    Ok(cfg.price * cfg.density * PI * t * l * (2.0 * r - t))
}

/// Hoop stress `pR/t` and thermal stress `E alpha dT / (2 (1 - nu))`.
pub fn tube_stresses(r: f64, l: f64, t: f64, cfg: &TubeConfig) -> Result<(f64, f64)> {
    check_geometry(r, l, t)?;
    let sp = cfg.pressure * r / t;
    let st = cfg.youngs * cfg.thermal_expansion * cfg.delta_t / (2.0 * (1.0 - cfg.poisson));
    Ok((sp, st))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BreeRegion {
    Elastic,
    Shakedown,
    Plastic,
    Ratcheting,
}

impl BreeRegion {
    pub fn is_safe(self) -> bool {
        matches!(self, BreeRegion::Elastic | BreeRegion::Shakedown)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreeState {
    pub x: f64,
    pub y: f64,
    pub region: BreeRegion,
    /// Excess `xy - 1`, clipped at zero.
    pub strain: f64,
}

/// Classifies a point of the Bree plane (`x = sigma_p / sigma_y`,
/// `y = sigma_t / sigma_y`). Boundary points go to the safer region.
pub fn bree_region(x: f64, y: f64) -> Result<BreeState> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::Domain(format!("Bree coordinates must be nonnegative, got ({x}, {y})")));
    }
    let region = if x + y <= 1.0 {
        BreeRegion::Elastic
    } else if x * y > 1.0 {
        BreeRegion::Ratcheting
    } else if y > 2.0 {
        BreeRegion::Plastic
    } else {
        BreeRegion::Shakedown
    };
    Ok(BreeState { x, y, region, strain: (x * y - 1.0).max(0.0) })
}

/// Euclidean distance from `(x, y)` to the safe/unsafe boundary
/// `{(s, 2): s <= 1/2} u {(s, 1/s): s >= 1/2}`.
pub fn bree_boundary_distance(x: f64, y: f64) -> f64 {
    let seg = {
        let sx = x.clamp(0.0, 0.5);
        ((x - sx).powi(2) + (y - 2.0).powi(2)).sqrt()
    };
    let dist = |s: f64| ((x - s).powi(2) + (y - 1.0 / s).powi(2)).sqrt();
    // Search in log s; the nearest hyperbola point cannot lie beyond x + seg.
    let lo = 0.5f64.ln();
    let hi = (x.max(0.5) + seg.min(dist(x.max(0.5))) + 1.0).ln();
    let n = 512;
    let h = (hi - lo) / n as f64;
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for i in 0..=n {
        let d = dist((lo + h * i as f64).exp());
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    let (mut a, mut b) = (lo + h * best.saturating_sub(1) as f64, (lo + h * (best + 1) as f64).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (dist(c.exp()), dist(d.exp()));
    for _ in 0..200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = dist(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = dist(d.exp());
        }
        if b - a < 1e-15 {
            break;
        }
    }
    seg.min(best_d).min(fc).min(fd)
}

/// Risk of creep-fatigue failure from a Bree state: below 0.5 in the safe
/// regions (scaled by distance to the boundary, 0 at the origin), above 0.5
/// in the unsafe ones (growing with distance plus strain excess), and exactly
/// 0.5 on the boundary.
pub fn bree_risk(state: &BreeState) -> f64 {
    let d = bree_boundary_distance(state.x, state.y);
    if state.region.is_safe() {
        0.5 * (1.0 - (d / 2f64.sqrt()).min(1.0))
    } else {
        0.5 + 0.5 * (1.0 - (-(d + state.strain)).exp())
    }
}

pub fn tube_bree_state(r: f64, l: f64, t: f64, cfg: &TubeConfig) -> Result<BreeState> {
    let (sp, st) = tube_stresses(r, l, t, cfg)?;
    bree_region(sp / cfg.yield_stress, st / cfg.yield_stress)
}

pub fn tube_risk(r: f64, l: f64, t: f64, cfg: &TubeConfig) -> Result<f64> {
    Ok(bree_risk(&tube_bree_state(r, l, t, cfg)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeFeasibility {
    pub normal_stress: bool,
    pub buckling: bool,
    pub aspect_ratio: bool,
}

impl TubeFeasibility {
    pub fn all(&self) -> bool {
        self.normal_stress && self.buckling && self.aspect_ratio
    }
}

/// Axial stress, buckling and aspect-ratio constraints.
pub fn tube_constraints(r: f64, l: f64, t: f64, cfg: &TubeConfig) -> Result<TubeFeasibility> {
    check_geometry(r, l, t)?;
    Ok(TubeFeasibility {
        normal_stress: cfg.axial_load / (2.0 * PI * r * t) - cfg.yield_stress <= 0.0,
        buckling: cfg.axial_load - PI.powi(3) * cfg.youngs * r.powi(3) * t / (4.0 * l * l) <= 0.0,
        aspect_ratio: r / l <= cfg.aspect_limit,
    })
}

/// `Phi((threshold - mu) / sigma) >= reliability`; a zero `sigma` reduces to
/// `mu <= threshold`.
pub fn probabilistic_feasibility(mu: f64, sigma: f64, threshold: f64, reliability: f64) -> bool {
    if sigma <= 0.0 {
        return mu <= threshold;
    }
    normal_cdf((threshold - mu) / sigma) >= reliability
}

/// Minimize risk and cost over `(R, L, t)`.
#[derive(Debug, Clone, Default)]
pub struct ThinTube {
    pub config: TubeConfig,
}

impl ThinTube {
    pub fn new(config: TubeConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn grid(&self) -> Result<DesignGrid> {
        DesignGrid::new(&self.config.bounds, &self.config.steps, &[])
    }
}

impl Problem for ThinTube {
    fn name(&self) -> &str {
        "thintube"
    }

    fn senses(&self) -> Vec<Sense> {
        vec![Sense::Min, Sense::Min]
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != 3 {
            return Err(Error::Shape { expected: 3, got: x.len() });
        }
        Ok(vec![tube_risk(x[0], x[1], x[2], &self.config)?, tube_cost(x[0], x[1], x[2], &self.config)?])
    }

    fn deterministic_feasible(&self, x: &[f64]) -> bool {
        tube_constraints(x[0], x[1], x[2], &self.config).is_ok_and(|f| f.all())
    }

    fn is_feasible(&self, x: &[f64], y: &[f64]) -> bool {
        self.deterministic_feasible(x) && y[0] <= self.config.risk_threshold
    }

    fn chance_constraint(&self) -> Option<(usize, f64, f64)> {
        Some((0, self.config.risk_threshold, self.config.reliability))
    }
}
