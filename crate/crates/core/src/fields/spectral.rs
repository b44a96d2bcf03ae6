//! Fourier transforms along the periodic x direction.
//!
//! Spectral data uses the layout `[m * ny + j]` for x-mode `m` (FFT order) and row `j`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Signed integer wavenumber of FFT bin `m`.
#[inline]
pub fn signed_mode(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Angular wavenumber `2π m' / L` of bin `m`.
#[inline]
pub fn wavenumber(m: usize, n: usize, l: f64) -> f64 {
    2.0 * PI * signed_mode(m, n) as f64 / l
}

/// Multiplier for a first derivative: `i k`, with the Nyquist bin zeroed.
#[inline]
pub fn derivative_factor(m: usize, n: usize, l: f64) -> f64 {
    if n % 2 == 0 && m == n / 2 {
        0.0
    } else {
        wavenumber(m, n, l)
    }
}

/// Cached plans plus scratch for repeated x-transforms on one grid.
pub struct XTransform {
    nx: usize,
    ny: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl XTransform {
    pub fn new(nx: usize, ny: usize) -> Self {
        let fwd = plan_forward(nx);
        let inv = plan_inverse(nx);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        XTransform {
            nx,
            ny,
            fwd,
            inv,
            buf: vec![Complex64::default(); nx],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Forward transform of real nodal data (unnormalized).
    pub fn forward(&mut self, data: &[f64], out: &mut [Complex64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                self.buf[i] = Complex64::new(data[i * ny + j], 0.0);
            }
            self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
            for m in 0..nx {
                out[m * ny + j] = self.buf[m];
            }
        }
    }

    pub fn forward_vec(&mut self, data: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); data.len()];
        self.forward(data, &mut out);
        out
    }

    /// Inverse transform including the `1/nx` normalization; keeps the real part.
    pub fn inverse(&mut self, spec: &[Complex64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let norm = 1.0 / nx as f64;
        for j in 0..ny {
            for m in 0..nx {
                self.buf[m] = spec[m * ny + j];
            }
            self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
            for i in 0..nx {
                out[i * ny + j] = self.buf[i].re * norm;
            }
        }
    }

    pub fn inverse_vec(&mut self, spec: &[Complex64]) -> Vec<f64> {
        let mut out = vec![0.0; spec.len()];
        self.inverse(spec, &mut out);
        out
    }
}

/// Enforces Hermitian symmetry by copying modes `1..nx/2` onto their conjugate partners and
/// making the mean and Nyquist bins real.
pub fn hermitian_fill(spec: &mut [Complex64], nx: usize, ny: usize) {
    for j in 0..ny {
        spec[j].im = 0.0;
        spec[(nx / 2) * ny + j].im = 0.0;
    }
    for m in 1..nx / 2 {
        for j in 0..ny {
            spec[(nx - m) * ny + j] = spec[m * ny + j].conj();
        }
    }
}

/// Real 2D FFT helper on an `n0 x n1` periodic box stored row-major.
pub fn fft2_real(data: &[f64], n0: usize, n1: usize) -> Vec<Complex64> {
    let mut a: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let f1 = plan_forward(n1);
    for row in a.chunks_mut(n1) {
        f1.process(row);
    }
    let f0 = plan_forward(n0);
    let mut col = vec![Complex64::default(); n0];
    for j in 0..n1 {
        for i in 0..n0 {
            col[i] = a[i * n1 + j];
        }
        f0.process(&mut col);
        for i in 0..n0 {
            a[i * n1 + j] = col[i];
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_identity() {
        let (nx, ny) = (16, 5);
        let data: Vec<f64> = (0..nx * ny).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut t = XTransform::new(nx, ny);
        let spec = t.forward_vec(&data);
        let back = t.inverse_vec(&spec);
        for (a, b) in data.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn signed_modes() {
        assert_eq!(signed_mode(0, 8), 0);
        assert_eq!(signed_mode(4, 8), 4);
        assert_eq!(signed_mode(5, 8), -3);
        assert_eq!(derivative_factor(4, 8, 1.0), 0.0);
    }
}
