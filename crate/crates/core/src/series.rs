//! Truncated power series in one variable and determinants of matrices of them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs a constant term");
        Series { coeffs }
    }

    pub fn constant(value: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[0] = value;
        Series { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, t: usize) -> f64 {
        self.coeffs[t]
    }

    pub fn mul(&self, other: &Series) -> Series {
        let deg = self.degree().min(other.degree());
        let mut out = vec![0.0; deg + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(deg + 1) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(deg + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Series> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 {
            return Err(Error::Numeric(
                "series with zero constant term is not invertible".into(),
            ));
        }
        let deg = self.degree();
        let mut inv = vec![0.0; deg + 1];
        inv[0] = 1.0 / c0;
        for k in 1..=deg {
            let acc: f64 = (1..=k).map(|j| self.coeffs[j] * inv[k - j]).sum();
            inv[k] = -acc / c0;
        }
        Ok(Series { coeffs: inv })
    }

    fn sub_product(&mut self, a: &Series, b: &Series) {
        let prod = a.mul(b);
        for (c, p) in self.coeffs.iter_mut().zip(prod.coeffs) {
            *c -= p;
        }
    }
}

/// Determinant of a square matrix of truncated series by Gaussian
/// elimination, pivoting on the constant terms.
pub(crate) fn det_series(mut matrix: Vec<Vec<Series>>, degree: usize) -> Result<Series> {
    let n = matrix.len();
    let mut det = Series::constant(1.0, degree);
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&a, &b| {
                matrix[a][k]
                    .coeff(0)
                    .abs()
                    .total_cmp(&matrix[b][k].coeff(0).abs())
            })
            .expect("non-empty range");
        if matrix[pivot_row][k].coeff(0) == 0.0 {
            return Err(Error::Numeric(
                "series determinant has a singular constant-term matrix".into(),
            ));
        }
        if pivot_row != k {
            matrix.swap(pivot_row, k);
            det = det.mul(&Series::constant(-1.0, degree));
        }
        let pivot = matrix[k][k].clone();
        let pivot_inv = pivot.inverse()?;
        det = det.mul(&pivot);
        let (upper, lower) = matrix.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        for row in lower.iter_mut() {
            let factor = row[k].mul(&pivot_inv);
            for j in k + 1..n {
                row[j].sub_product(&factor, &pivot_row[j]);
            }
        }
    }
    Ok(det)
}
