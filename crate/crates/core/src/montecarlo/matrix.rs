//! Small dense complex matrices, row-major.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub(crate) struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// I.i.d. standard complex Gaussian entries, filled row by row.
    pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let data = (0..rows * cols)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        CMatrix { rows, cols, data }
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn column_norms_sq(&self) -> Vec<f64> {
        let mut norms = vec![0.0; self.cols];
        for row in self.data.chunks(self.cols) {
            for (n, z) in norms.iter_mut().zip(row) {
                *n += z.norm_sqr();
            }
        }
        norms
    }

    /// An upper-triangular `R` with `R^H R = self^H self`, or `self` when it
    /// already has no more rows than columns. Left-multiplying either by an
    /// i.i.d. Gaussian matrix gives the same distribution, so tall factors
    /// can be compressed before the next layer is applied.
    pub fn gram_factor(self) -> CMatrix {
        if self.rows <= self.cols {
            return self;
        }
        let n = self.cols;
        let mut gram = CMatrix::zeros(n, n);
        for row in self.data.chunks(n) {
            for i in 0..n {
                let ci = row[i].conj();
                for (j, &rj) in row.iter().enumerate().skip(i) {
                    gram.data[i * n + j] += ci * rj;
                }
            }
        }
        let scale = (0..n).map(|i| gram.at(i, i).re).fold(0.0, f64::max);
        let mut r = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = gram.at(j, j).re;
            for k in 0..j {
                d -= r.at(k, j).norm_sqr();
            }
            // Rank-deficient Gram matrix: the remaining row is zero.
            if d <= 1e-13 * scale {
                continue;
            }
            let rjj = d.sqrt();
            r.data[j * n + j] = Complex64::new(rjj, 0.0);
            for l in j + 1..n {
                let mut v = gram.at(j, l);
                for k in 0..j {
                    v -= r.at(k, j).conj() * r.at(k, l);
                }
                r.data[j * n + l] = v / rjj;
            }
        }
        r
    }
}
