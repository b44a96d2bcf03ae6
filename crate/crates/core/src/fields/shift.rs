//! Evaluation of `f(x + r)` on the grid.

use rustfft::num_complex::Complex64;

use super::field::ScalarField;
use super::spectral::{signed_mode, XTransform};
use crate::error::{Error, Result};

/// Shifted field plus a per-row validity mask (`y_j + r_y` outside `[0, H]` is invalid).
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedField {
    pub field: ScalarField,
    pub valid_rows: Vec<bool>,
}

impl ShiftedField {
    pub fn is_valid(&self, j: usize) -> bool {
        self.valid_rows[j]
    }
}

const ALIGN_TOL: f64 = 1e-9;

/// Returns the integer grid offset if `r` is a multiple of `h` (within round-off).
pub fn grid_offset(r: f64, h: f64) -> Option<i64> {
    let q = r / h;
    let n = q.round();
    if (q - n).abs() <= ALIGN_TOL * q.abs().max(1.0) {
        Some(n as i64)
    } else {
        None
    }
}

/// `f(x + r)`: periodic in x (index roll when grid aligned, Fourier phase shift otherwise)
/// and row shift or four-point cubic interpolation in y.
pub fn shift_sample(f: &ScalarField, r: [f64; 2]) -> Result<ShiftedField> {
    let d = f.domain;
    let (nx, ny) = (d.nx, d.ny);
    if !(r[1].abs() < d.h) {
        return Err(Error::InvalidArgument(format!(
            "|r_y| = {} must be below H = {}",
            r[1].abs(),
            d.h
        )));
    }

    // x direction
    let xs: Vec<f64> = match grid_offset(r[0], d.dx()) {
        Some(s) => {
            let s = s.rem_euclid(nx as i64) as usize;
            let mut out = vec![0.0; f.data.len()];
            for i in 0..nx {
                let src = (i + s) % nx;
                out[i * ny..(i + 1) * ny].copy_from_slice(&f.data[src * ny..(src + 1) * ny]);
            }
            out
        }
        None => {
            let mut t = XTransform::new(nx, ny);
            let mut spec = t.forward_vec(&f.data);
            for m in 0..nx {
                let k = 2.0 * std::f64::consts::PI * signed_mode(m, nx) as f64 / d.lx;
                let factor = if m == nx / 2 {
                    // The Nyquist bin stays real: shift its cosine interpretation.
                    Complex64::new((k * r[0]).cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, k * r[0])
                };
                for j in 0..ny {
                    spec[m * ny + j] *= factor;
                }
            }
            t.inverse_vec(&spec)
        }
    };

    // y direction
    let dy = d.dy();
    let mut valid_rows = vec![false; ny];
    let mut out = vec![0.0; f.data.len()];
    match grid_offset(r[1], dy) {
        Some(q) => {
            for j in 0..ny {
                let src = j as i64 + q;
                if src >= 0 && src < ny as i64 {
                    valid_rows[j] = true;
                    for i in 0..nx {
                        out[i * ny + j] = xs[i * ny + src as usize];
                    }
                }
            }
        }
        None => {
            for j in 0..ny {
                let y = d.y(j) + r[1];
                if y < 0.0 || y > d.h {
                    continue;
                }
                valid_rows[j] = true;
                let s = y / dy;
                // four-point stencil [p-1, p+2], slid inward at the walls
                let p = (s.floor() as i64).clamp(1, ny as i64 - 3);
                let base = (p - 1) as usize;
                let t = s - (p - 1) as f64;
                let w = lagrange4(t);
                for i in 0..nx {
                    let col = &xs[i * ny + base..i * ny + base + 4];
                    out[i * ny + j] = w[0] * col[0] + w[1] * col[1] + w[2] * col[2] + w[3] * col[3];
                }
            }
        }
    }
    if !valid_rows.iter().any(|&v| v) {
        return Err(Error::InvalidArgument(format!("shift r_y = {} leaves no valid rows", r[1])));
    }
    Ok(ShiftedField {
        field: ScalarField {
            domain: d,
            time: f.time,
            data: out,
        },
        valid_rows,
    })
}

/// Cubic Lagrange weights on nodes `0, 1, 2, 3` evaluated at `t`.
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ]
}
