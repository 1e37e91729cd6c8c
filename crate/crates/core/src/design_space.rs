//! Discretized design spaces, space-filling starting samples and the growing
//! training matrix of evaluated designs.

use std::collections::HashSet;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numfmt::fmt_num;
use crate::seed::rng_for;

/// A tensor-product grid over a box, with per-dimension coordinate exclusions.
///
/// Points are enumerated lexicographically: the first dimension varies slowest.
/// A point is dropped when any of its coordinates is excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGrid {
    bounds: Vec<(f64, f64)>,
    steps: Vec<usize>,
    exclusions: Vec<Vec<f64>>,
    /// Surviving coordinate values per dimension.
    axes: Vec<Vec<f64>>,
}

impl DesignGrid {
    /// `exclusions` may be shorter than `bounds`; missing entries exclude nothing.
    pub fn new(bounds: &[(f64, f64)], steps: &[usize], exclusions: &[Vec<f64>]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidGrid("no dimensions".into()));
        }
        if bounds.len() != steps.len() {
            return Err(Error::InvalidGrid(format!(
                "{} bounds but {} step counts",
                bounds.len(),
                steps.len()
            )));
        }
        if exclusions.len() > bounds.len() {
            return Err(Error::InvalidGrid("more exclusion lists than dimensions".into()));
        }
        let mut axes = Vec::with_capacity(bounds.len());
        for (m, (&(lo, hi), &n)) in bounds.iter().zip(steps).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                return Err(Error::InvalidGrid(format!("dimension {m}: degenerate bounds [{lo}, {hi}]")));
            }
            if n < 2 {
                return Err(Error::InvalidGrid(format!("dimension {m}: {n} steps, need at least 2")));
            }
            let spacing = (hi - lo) / (n - 1) as f64;
            let excluded = exclusions.get(m).map(Vec::as_slice).unwrap_or(&[]);
            let axis: Vec<f64> = (0..n)
                .map(|i| axis_value(lo, hi, n, i))
                .filter(|v| !excluded.iter().any(|e| (v - e).abs() <= 1e-9 * spacing))
                .collect();
            if axis.is_empty() {
                return Err(Error::InvalidGrid(format!("dimension {m}: every coordinate excluded")));
            }
            axes.push(axis);
        }
        let mut exclusions = exclusions.to_vec();
        exclusions.resize(bounds.len(), Vec::new());
        Ok(Self { bounds: bounds.to_vec(), steps: steps.to_vec(), exclusions, axes })
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn exclusions(&self) -> &[Vec<f64>] {
        &self.exclusions
    }

    /// Coordinate values that survive exclusion, per dimension.
    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point at the given per-axis indices (indices into [`axes`](Self::axes)).
    pub fn point_at(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&i, axis)| axis[i]).collect()
    }

    /// All grid points in canonical order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.dims();
        let total = self.len();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            out.push(self.point_at(&idx));
            for m in (0..d).rev() {
                idx[m] += 1;
                if idx[m] < self.axes[m].len() {
                    break;
                }
                idx[m] = 0;
            }
        }
        out
    }

    /// Writes the grid as CSV with header `x1..xd`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wtr.write_record((1..=self.dims()).map(|m| format!("x{m}")))?;
        for p in self.points() {
            wtr.write_record(p.iter().map(|&v| fmt_num(v)))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn axis_value(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (i as f64 * (hi - lo)) / (n - 1) as f64
    }
}

/// Latin-hypercube starting sample on the grid.
///
/// Each axis is cut into `n0` equal strata over its surviving coordinates; a
/// random permutation assigns strata to samples and a uniform draw inside the
/// stratum is snapped down to a grid coordinate. Duplicates are redrawn.
pub fn initial_doe(grid: &DesignGrid, n0: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let total = grid.len();
    if n0 == 0 || n0 > total {
        return Err(Error::Budget { requested: n0, available: total });
    }
    if n0 == total {
        return Ok(grid.points());
    }
    let d = grid.dims();
    let mut rng = rng_for(seed, "doe", 0);
    let perms: Vec<Vec<usize>> = (0..d)
        .map(|_| {
            let mut p: Vec<usize> = (0..n0).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();

    let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(n0);
    let mut out = Vec::with_capacity(n0);
    for i in 0..n0 {
        let mut chosen = None;
        for _attempt in 0..64 {
            let idx: Vec<usize> = (0..d)
                .map(|m| {
                    let len = grid.axes()[m].len();
                    let u = (perms[m][i] as f64 + rng.random::<f64>()) / n0 as f64;
                    ((u * len as f64).floor() as usize).min(len - 1)
                })
                .collect();
            if !seen.contains(&idx) {
                chosen = Some(idx);
                break;
            }
        }
        let idx = match chosen {
            Some(idx) => idx,
            // Strata exhausted on some axis: take the first unused point in
            // canonical order so the sample size is always honoured.
            None => first_unused(grid, &seen),
        };
        seen.insert(idx.clone());
        out.push(grid.point_at(&idx));
    }
    Ok(out)
}

fn first_unused(grid: &DesignGrid, seen: &HashSet<Vec<usize>>) -> Vec<usize> {
    let d = grid.dims();
    let mut idx = vec![0usize; d];
    loop {
        if !seen.contains(&idx) {
            return idx;
        }
        for m in (0..d).rev() {
            idx[m] += 1;
            if idx[m] < grid.axes()[m].len() {
                break;
            }
            idx[m] = 0;
        }
    }
}

/// One evaluated design.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub design: Vec<f64>,
    pub objectives: Vec<f64>,
    pub feasible: bool,
}

fn design_key(design: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 are the same design.
    design.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect()
}

/// The training data matrix: evaluated designs, their objectives and
/// feasibility flags. Values are immutable; [`augment`](Self::augment) returns
/// a new set.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    rows: Vec<Row>,
    n_objectives: usize,
}

impl TrainingSet {
    pub fn new(n_objectives: usize) -> Self {
        Self { rows: Vec::new(), n_objectives }
    }

    pub fn from_rows(n_objectives: usize, rows: Vec<Row>) -> Result<Self> {
        Self::new(n_objectives).augment(rows)
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_objectives(&self) -> usize {
        self.n_objectives
    }

    pub fn dims(&self) -> Option<usize> {
        self.rows.first().map(|r| r.design.len())
    }

    pub fn designs(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.design.clone()).collect()
    }

    pub fn objective(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.objectives[i]).collect()
    }

    pub fn contains(&self, design: &[f64]) -> bool {
        let key = design_key(design);
        self.rows.iter().any(|r| design_key(&r.design) == key)
    }

    /// Rows flagged feasible that also pass `constraint`, order preserved.
    pub fn filter_feasible(&self, constraint: impl Fn(&Row) -> bool) -> TrainingSet {
        TrainingSet {
            rows: self.rows.iter().filter(|r| r.feasible && constraint(r)).cloned().collect(),
            n_objectives: self.n_objectives,
        }
    }

    /// The feasible subset `D_f` of this set.
    pub fn feasible(&self) -> TrainingSet {
        self.filter_feasible(|_| true)
    }

    /// Appends rows in order. Fails on a design already present or repeated
    /// within `new_rows`, or on a wrong objective count.
    pub fn augment(&self, new_rows: impl IntoIterator<Item = Row>) -> Result<TrainingSet> {
        let mut keys: HashSet<Vec<u64>> = self.rows.iter().map(|r| design_key(&r.design)).collect();
        let mut rows = self.rows.clone();
        let dims = self.dims();
        for row in new_rows {
            if row.objectives.len() != self.n_objectives {
                return Err(Error::Shape { expected: self.n_objectives, got: row.objectives.len() });
            }
            let d = dims.or_else(|| rows.first().map(|r: &Row| r.design.len()));
            if let Some(d) = d {
                if row.design.len() != d {
                    return Err(Error::Shape { expected: d, got: row.design.len() });
                }
            }
            if !keys.insert(design_key(&row.design)) {
                return Err(Error::DuplicateRow(row.design));
            }
            rows.push(row);
        }
        Ok(TrainingSet { rows, n_objectives: self.n_objectives })
    }

    /// CSV with header `x1..xd,y1..yN,feasible`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let d = self.dims().unwrap_or(0);
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let header: Vec<String> = (1..=d)
            .map(|m| format!("x{m}"))
            .chain((1..=self.n_objectives).map(|i| format!("y{i}")))
            .chain(std::iter::once("feasible".to_string()))
            .collect();
        wtr.write_record(&header)?;
        for r in &self.rows {
            let rec: Vec<String> = r
                .design
                .iter()
                .chain(&r.objectives)
                .map(|&v| fmt_num(v))
                .chain(std::iter::once(r.feasible.to_string()))
                .collect();
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<TrainingSet> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let d = header.iter().filter(|h| h.starts_with('x')).count();
        let n_obj = header.iter().filter(|h| h.starts_with('y')).count();
        if header.len() != d + n_obj + 1 || header.get(header.len() - 1) != Some("feasible") {
            return Err(Error::Parse(format!("unexpected training-set header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .take(d + n_obj)
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?;
            let feasible = match &rec[d + n_obj] {
                "true" => true,
                "false" => false,
                other => return Err(Error::Parse(format!("bad feasible flag {other:?}"))),
            };
            rows.push(Row { design: nums[..d].to_vec(), objectives: nums[d..].to_vec(), feasible });
        }
        TrainingSet::from_rows(n_obj, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(x: &[f64], y: &[f64]) -> Row {
        Row { design: x.to_vec(), objectives: y.to_vec(), feasible: true }
    }

    #[test]
    fn unit_square_corners() {
        let g = DesignGrid::new(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2], &[]).unwrap();
        assert_eq!(g.points(), vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn midpoint_spacing() {
        let g = DesignGrid::new(&[(0.0, 1.0)], &[3], &[]).unwrap();
        assert_eq!(g.points(), vec![vec![0.0], vec![0.5], vec![1.0]]);
    }

    #[test]
    fn benchmark_grid_count_with_axis_exclusions() {
        let g = DesignGrid::new(&[(-3.0, 3.0), (-2.0, 2.0)], &[101, 101], &[vec![0.0], vec![0.0]]).unwrap();
        // Brute-force inclusion-exclusion over the raw enumeration.
        let mut count = 0;
        for i in 0..101 {
            for j in 0..101 {
                if i != 50 && j != 50 {
                    count += 1;
                }
            }
        }
        // |A u B| = 101 + 101 - 1, so 10201 - 201 survive.
        assert_eq!(count, 10000);
        assert_eq!(g.len(), count);
        let pts = g.points();
        assert_eq!(pts.len(), count);
        assert!(pts.iter().all(|p| p[0] != 0.0 && p[1] != 0.0));
        assert!(pts.contains(&vec![3.0, 2.0]));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(matches!(DesignGrid::new(&[(1.0, 1.0)], &[3], &[]), Err(Error::InvalidGrid(_))));
        assert!(matches!(DesignGrid::new(&[(0.0, 1.0)], &[1], &[]), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn doe_full_grid_is_canonical() {
        let g = DesignGrid::new(&[(0.0, 1.0), (0.0, 2.0)], &[3, 2], &[]).unwrap();
        assert_eq!(initial_doe(&g, 6, 9).unwrap(), g.points());
        assert!(matches!(initial_doe(&g, 7, 9), Err(Error::Budget { .. })));
    }

    #[test]
    fn doe_is_latin_on_square_grid() {
        let g = DesignGrid::new(&[(0.0, 9.0), (0.0, 9.0)], &[10, 10], &[]).unwrap();
        for seed in 0..20 {
            let s = initial_doe(&g, 10, seed).unwrap();
            assert_eq!(s, initial_doe(&g, 10, seed).unwrap());
            for m in 0..2 {
                let mut idx: Vec<usize> = s.iter().map(|p| p[m] as usize).collect();
                idx.sort_unstable();
                assert_eq!(idx, (0..10).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn doe_points_are_distinct_grid_points() {
        let g = DesignGrid::new(&[(-3.0, 3.0), (-2.0, 2.0)], &[7, 5], &[vec![0.0], vec![0.0]]).unwrap();
        let pts = g.points();
        let s = initial_doe(&g, 20, 3).unwrap();
        assert_eq!(s.len(), 20);
        let keys: HashSet<_> = s.iter().map(|p| design_key(p)).collect();
        assert_eq!(keys.len(), 20);
        assert!(s.iter().all(|p| pts.contains(p)));
    }

    #[test]
    fn feasibility_filter() {
        let d = TrainingSet::from_rows(1, vec![row(&[-1.0, 0.0], &[1.0]), row(&[1.0, 0.0], &[2.0])]).unwrap();
        assert_eq!(d.filter_feasible(|_| true), d);
        let kept = d.filter_feasible(|r| r.design[0] <= 0.0);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept.rows()[0].design, vec![-1.0, 0.0]);
        assert_eq!(kept.feasible().feasible(), kept.feasible());
    }

    #[test]
    fn augment_appends_and_rejects_duplicates() {
        let d = TrainingSet::from_rows(1, vec![row(&[0.0], &[1.0])]).unwrap();
        assert_eq!(d.augment(Vec::new()).unwrap(), d);
        let e = d.augment(vec![row(&[1.0], &[3.0])]).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.rows()[1], row(&[1.0], &[3.0]));
        assert!(matches!(e.augment(vec![row(&[0.0], &[5.0])]), Err(Error::DuplicateRow(_))));
        assert!(matches!(e.augment(vec![row(&[2.0], &[5.0, 1.0])]), Err(Error::Shape { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let mut r = row(&[0.1, -2.5], &[162.9, -0.2501]);
        r.feasible = false;
        let d = TrainingSet::from_rows(2, vec![r, row(&[1.0 / 3.0, 2.0], &[1e-9, 7.0])]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,y1,y2,feasible\n"));
        let back = TrainingSet::read_csv(buf.as_slice()).unwrap();
        for (a, b) in back.rows().iter().zip(d.rows()) {
            assert_eq!(a.feasible, b.feasible);
            for (u, v) in a.design.iter().chain(&a.objectives).zip(b.design.iter().chain(&b.objectives)) {
                assert!((u - v).abs() <= 1e-12 * v.abs().max(1e-300));
            }
        }
    }
}
