//! Frequentist members of the portfolio: mean, additive linear, log-linear and
//! full quadratic models, all fitted by ordinary least squares.

use nalgebra::DVector;

use super::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, poly_features, InputScaler, PolyOrder};

/// A least-squares polynomial fitted on `[0, 1]`-scaled inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub order: PolyOrder,
    pub scaler: InputScaler,
    /// Coefficients on the scaled basis, ordered as [`poly_features`].
    pub coefficients: Vec<f64>,
}

impl PolyFit {
    pub fn fit(data: &Dataset, order: PolyOrder) -> Result<Self> {
        let n = data.len();
        if n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let scaler = InputScaler::fit(&data.x);
        let rows: Vec<Vec<f64>> = data.x.iter().map(|p| poly_features(&scaler.scale(p), order)).collect();
        let coefficients = if order == PolyOrder::Constant {
            vec![data.y.iter().sum::<f64>() / n as f64]
        } else {
            let a = crate::linalg::design_matrix(&rows);
            let y = DVector::from_column_slice(&data.y);
            least_squares(&a, &y)?.iter().copied().collect()
        };
        Ok(Self { order, scaler, coefficients })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        poly_features(&self.scaler.scale(x), self.order).iter().zip(&self.coefficients).map(|(f, b)| f * b).sum()
    }

    /// Coefficients on the raw-input basis `1, x_m, x_m^2, x_a x_b`.
    pub fn raw_coefficients(&self) -> Vec<f64> {
        let d = self.scaler.dims();
        // z_m = a_m x_m + c_m
        let a: Vec<f64> = self.scaler.span.iter().map(|s| 1.0 / s).collect();
        let c: Vec<f64> = self.scaler.lo.iter().zip(&a).map(|(l, am)| -l * am).collect();
        let b = &self.coefficients;
        let mut raw = vec![0.0; self.order.terms(d)];
        raw[0] = b[0];
        if self.order == PolyOrder::Constant {
            return raw;
        }
        for m in 0..d {
            raw[1 + m] += b[1 + m] * a[m];
            raw[0] += b[1 + m] * c[m];
        }
        if self.order == PolyOrder::Quadratic {
            for m in 0..d {
                let bm = b[1 + d + m];
                raw[1 + d + m] += bm * a[m] * a[m];
                raw[1 + m] += 2.0 * bm * a[m] * c[m];
                raw[0] += bm * c[m] * c[m];
            }
            let mut k = 1 + 2 * d;
            for p in 0..d {
                for q in p + 1..d {
                    let bpq = b[k];
                    raw[k] += bpq * a[p] * a[q];
                    raw[1 + p] += bpq * a[p] * c[q];
                    raw[1 + q] += bpq * c[p] * a[q];
                    raw[0] += bpq * c[p] * c[q];
                    k += 1;
                }
            }
        }
        raw
    }
}

/// `y = exp(b0) * prod_m x_m^{b_m}`, fitted by OLS in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearFit {
    /// `b0, b_1..b_d`.
    pub coefficients: Vec<f64>,
}

impl LogLinearFit {
    pub fn fit(data: &Dataset) -> Result<Self> {
        if let Some(v) = data.y.iter().find(|v| **v <= 0.0) {
            return Err(Error::Domain(format!("log-linear model needs positive outputs, found {v}")));
        }
        if let Some(v) = data.x.iter().flatten().find(|v| **v <= 0.0) {
            return Err(Error::Domain(format!("log-linear model needs positive inputs, found {v}")));
        }
        let rows: Vec<Vec<f64>> =
            data.x.iter().map(|p| std::iter::once(1.0).chain(p.iter().map(|v| v.ln())).collect()).collect();
        let a = crate::linalg::design_matrix(&rows);
        let y = DVector::from_iterator(data.len(), data.y.iter().map(|v| v.ln()));
        let coefficients = least_squares(&a, &y)?.iter().copied().collect();
        Ok(Self { coefficients })
    }

    /// Non-positive inputs have no log; they predict NaN.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let eta: f64 = self.coefficients[0] + x.iter().zip(&self.coefficients[1..]).map(|(v, b)| b * v.ln()).sum::<f64>();
        eta.exp()
    }
}
