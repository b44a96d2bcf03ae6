//! Channel Poisson problems, one tridiagonal solve per x-mode.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{ScalarField, VelocityField, VorticityField};
use super::linalg::Tridiag;
use super::ops;
use super::spectral::{hermitian_fill, wavenumber, XTransform};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WallCondition {
    DirichletZero,
    NeumannZero,
}

/// Three-point channel Laplacian `(φ_{j-1} − 2φ_j + φ_{j+1})/Δy² − k²φ_j` in mode space,
/// with ghost-node reflection at the walls for the Neumann case.
fn mode_matrix(ny: usize, dy: f64, k2: f64, bc: WallCondition) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let c = 1.0 / (dy * dy);
    let mut lower = vec![c; ny];
    let mut diag = vec![-2.0 * c - k2; ny];
    let mut upper = vec![c; ny];
    match bc {
        WallCondition::DirichletZero => {
            diag[0] = 1.0;
            upper[0] = 0.0;
            diag[ny - 1] = 1.0;
            lower[ny - 1] = 0.0;
        }
        WallCondition::NeumannZero => {
            upper[0] = 2.0 * c;
            lower[ny - 1] = 2.0 * c;
        }
    }
    lower[0] = 0.0;
    upper[ny - 1] = 0.0;
    (lower, diag, upper)
}

/// Applies the discrete channel Laplacian (same stencil as the solver) to nodal data.
pub fn apply_laplacian(f: &ScalarField, bc: WallCondition) -> ScalarField {
    let d = f.domain;
    let (nx, ny, dy) = (d.nx, d.ny, d.dy());
    let mut t = XTransform::new(nx, ny);
    let spec = t.forward_vec(&f.data);
    let mut out = vec![Complex64::default(); spec.len()];
    for m in 0..nx {
        let k = wavenumber(m, nx, d.lx);
        let (lo, di, up) = mode_matrix(ny, dy, k * k, bc);
        let col = &spec[m * ny..(m + 1) * ny];
        for j in 0..ny {
            let mut s = col[j] * di[j];
            if j > 0 {
                s += col[j - 1] * lo[j];
            }
            if j + 1 < ny {
                s += col[j + 1] * up[j];
            }
            out[m * ny + j] = s;
        }
    }
    ScalarField {
        domain: d,
        time: f.time,
        data: t.inverse_vec(&out),
    }
}

/// Solves `Δφ = rhs`, periodic in x, with the chosen homogeneous wall condition.
///
/// Dirichlet rows ignore `rhs` on the walls. For Neumann data the trapezoidal mean of `rhs`
/// must vanish; the returned potential then has zero mean.
pub fn poisson_solve_channel(rhs: &ScalarField, bc: WallCondition) -> Result<ScalarField> {
    let d = rhs.domain;
    let (nx, ny, dy) = (d.nx, d.ny, d.dy());
    if bc == WallCondition::NeumannZero {
        let mean = rhs.dot(&ScalarField::from_fn(&d, |_, _| 1.0)) / d.area();
        let scale = rhs.max_abs();
        let limit = 1e-12 * scale;
        if mean.abs() > limit {
            return Err(Error::IncompatibleNeumann { mean, limit });
        }
    }
    let mut t = XTransform::new(nx, ny);
    let mut spec = t.forward_vec(&rhs.data);
    for m in 0..=nx / 2 {
        let k = wavenumber(m, nx, d.lx);
        let col = &mut spec[m * ny..(m + 1) * ny];
        if bc == WallCondition::DirichletZero {
            col[0] = Complex64::default();
            col[ny - 1] = Complex64::default();
        }
        if m == 0 && bc == WallCondition::NeumannZero {
            // Singular mean mode: pin φ_0 = 0, drop the redundant first row, then remove
            // the mean afterwards.
            let (lo, di, up) = mode_matrix(ny, dy, 0.0, bc);
            let solver = Tridiag::new(&lo[1..], &di[1..], &up[1..])?;
            let mut sub: Vec<Complex64> = col[1..].to_vec();
            solver.solve_in_place(&mut sub);
            col[0] = Complex64::default();
            col[1..].copy_from_slice(&sub);
            let w = d.y_weights();
            let mean: Complex64 = col.iter().zip(&w).map(|(c, w)| *c * *w).sum::<Complex64>() / d.h;
            col.iter_mut().for_each(|c| *c -= mean);
        } else {
            let (lo, di, up) = mode_matrix(ny, dy, k * k, bc);
            let solver = Tridiag::new(&lo, &di, &up)?;
            solver.solve_in_place(col);
        }
    }
    hermitian_fill(&mut spec, nx, ny);
    Ok(ScalarField {
        domain: d,
        time: rhs.time,
        data: t.inverse_vec(&spec),
    })
}

/// Stream function `ψ` with `−Δψ = ω`, `ψ = 0` on both walls.
pub fn stream_potential(w: &VorticityField) -> ScalarField {
    let mut rhs = w.w.clone();
    rhs.scale(-1.0);
    poisson_solve_channel(&rhs, WallCondition::DirichletZero)
        .expect("Dirichlet channel Laplacian is nonsingular")
}

/// Velocity `∇⊥ψ = (∂yψ, −∂xψ)` recovered from vorticity through the stream function.
pub fn stream_function(w: &VorticityField, nu: f64) -> VelocityField {
    let psi = stream_potential(w);
    ops::perp_gradient(&psi, nu)
}
