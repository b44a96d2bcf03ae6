//! Small direct solvers used per x-mode.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Pre-factored tridiagonal system `lower[j] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = d[j]`.
///
/// Real coefficients, real or complex right-hand sides. Thomas algorithm without pivoting,
/// valid for the diagonally dominant matrices built here.
#[derive(Clone, Debug)]
pub struct Tridiag {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_mod: Vec<f64>,
}

impl Tridiag {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut inv_pivot = vec![0.0; n];
        let mut upper_mod = vec![0.0; n];
        let mut prev = 0.0;
        for j in 0..n {
            let piv = diag[j] - if j > 0 { lower[j] * prev } else { 0.0 };
            if piv.abs() < 1e-300 || !piv.is_finite() {
                return Err(Error::Numerical(format!("singular tridiagonal pivot at row {j}")));
            }
            inv_pivot[j] = 1.0 / piv;
            upper_mod[j] = if j + 1 < n { upper[j] * inv_pivot[j] } else { 0.0 };
            prev = upper_mod[j];
        }
        Ok(Tridiag {
            lower: lower.to_vec(),
            inv_pivot,
            upper_mod,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve_in_place<T>(&self, d: &mut [T])
    where
        T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = self.len();
        d[0] = d[0] * self.inv_pivot[0];
        for j in 1..n {
            d[j] = (d[j] - d[j - 1] * self.lower[j]) * self.inv_pivot[j];
        }
        for j in (0..n - 1).rev() {
            d[j] = d[j] - d[j + 1] * self.upper_mod[j];
        }
    }
}

/// Dense LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn new(mut a: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::Numerical(format!("singular matrix at column {k}")));
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f != 0.0 {
                    a[i * n + k] = f;
                    for c in k + 1..n {
                        a[i * n + c] -= f * a[k * n + c];
                    }
                } else {
                    a[i * n + k] = 0.0;
                }
            }
        }
        Ok(DenseLu { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            let row = &self.lu[i * n..i * n + i];
            for (c, l) in row.iter().enumerate() {
                s -= x[c] * *l;
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for c in i + 1..n {
                s -= x[c] * self.lu[i * n + c];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub fn solve_real(&self, b: &[f64]) -> Vec<f64> {
        let bc: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.solve(&bc).into_iter().map(|c| c.re).collect()
    }
}
