//! Small numerical helpers shared by the regression models and the GP.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Affine map of each input dimension onto `[0, 1]` using the span of a
/// reference sample. Zero-span dimensions are shifted but not scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct InputScaler {
    pub lo: Vec<f64>,
    pub span: Vec<f64>,
}

impl InputScaler {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in x {
            for m in 0..d {
                lo[m] = lo[m].min(p[m]);
                hi[m] = hi[m].max(p[m]);
            }
        }
        let span = lo.iter().zip(&hi).map(|(l, h)| if h > l { h - l } else { 1.0 }).collect();
        Self { lo, span }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.lo.iter().zip(&self.span)).map(|(v, (l, s))| (v - l) / s).collect()
    }
}

/// Output standardization to zero mean / unit variance. Constant outputs keep
/// a unit scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputScaler {
    pub mean: f64,
    pub std: f64,
}

impl OutputScaler {
    pub fn fit(y: &[f64]) -> Self {
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = if y.len() > 1 { y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        let std = var.sqrt();
        let std = if std > 1e-300 * mean.abs().max(1.0) && std.is_finite() { std } else { 1.0 };
        Self { mean, std }
    }

    pub fn scale(&self, y: f64) -> f64 {
        (y - self.mean) / self.std
    }

    pub fn unscale(&self, y: f64) -> f64 {
        self.mean + self.std * y
    }
}

/// Polynomial regression bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyOrder {
    Constant,
    Linear,
    Quadratic,
}

impl PolyOrder {
    /// Number of basis terms in `d` dimensions.
    pub fn terms(self, d: usize) -> usize {
        match self {
            PolyOrder::Constant => 1,
            PolyOrder::Linear => 1 + d,
            PolyOrder::Quadratic => 1 + 2 * d + d * (d.saturating_sub(1)) / 2,
        }
    }

    pub fn lower(self) -> Option<PolyOrder> {
        match self {
            PolyOrder::Quadratic => Some(PolyOrder::Linear),
            PolyOrder::Linear => Some(PolyOrder::Constant),
            PolyOrder::Constant => None,
        }
    }
}

/// Basis row: `1, z_m, z_m^2, z_a z_b (a < b)` truncated to `order`.
pub fn poly_features(z: &[f64], order: PolyOrder) -> Vec<f64> {
    let d = z.len();
    let mut f = Vec::with_capacity(order.terms(d));
    f.push(1.0);
    if order == PolyOrder::Constant {
        return f;
    }
    f.extend_from_slice(z);
    if order == PolyOrder::Quadratic {
        f.extend(z.iter().map(|v| v * v));
        for a in 0..d {
            for b in a + 1..d {
                f.push(z[a] * z[b]);
            }
        }
    }
    f
}

pub fn design_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let q = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, q, |i, j| rows[i][j])
}

/// Ordinary least squares via SVD, refusing rank-deficient systems and
/// systems without residual degrees of freedom.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let (n, q) = a.shape();
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    if rank < q || smax == 0.0 {
        return Err(Error::SingularFit { rank, columns: q });
    }
    if n <= q {
        return Err(Error::InsufficientData { needed: q + 1, got: n });
    }
    svd.solve(y, tol).map_err(|e| Error::Parse(e.to_string()))
}

/// In-place Cholesky of a small dense SPD matrix stored row-major. Returns
/// `false` if the matrix is not positive definite.
pub fn cholesky_small(a: &mut [f64], p: usize) -> bool {
    for j in 0..p {
        let mut s = a[j * p + j];
        for k in 0..j {
            s -= a[j * p + k] * a[j * p + k];
        }
        if s <= 0.0 || !s.is_finite() {
            return false;
        }
        let d = s.sqrt();
        a[j * p + j] = d;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / d;
        }
        for k in j + 1..p {
            a[j * p + k] = 0.0;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_term_count() {
        assert_eq!(PolyOrder::Quadratic.terms(3), 10);
        assert_eq!(PolyOrder::Quadratic.terms(2), 6);
        assert_eq!(poly_features(&[2.0, 3.0, 5.0], PolyOrder::Quadratic), vec![1., 2., 3., 5., 4., 9., 25., 6., 10., 15.]);
    }

    #[test]
    fn small_cholesky_matches_nalgebra() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]);
        let mut a: Vec<f64> = m.transpose().as_slice().to_vec();
        assert!(cholesky_small(&mut a, 3));
        let l = m.cholesky().unwrap().l();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i * 3 + j] - l[(i, j)]).abs() < 1e-12);
            }
        }
        let mut bad = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_small(&mut bad, 2));
    }
}
