//! Discrete differential operators: spectral in x, second-order differences in y
//! (centered in the interior, one-sided second order on the wall rows).

use rustfft::num_complex::Complex64;

use super::domain::DomainSpec;
use super::field::{ScalarField, VelocityField, VorticityField};
use super::spectral::{derivative_factor, XTransform};

/// `∂x` applied to nodal data.
pub fn dx_data(domain: &DomainSpec, data: &[f64]) -> Vec<f64> {
    let mut t = XTransform::new(domain.nx, domain.ny);
    dx_with(&mut t, domain, data)
}

pub fn dx_with(t: &mut XTransform, domain: &DomainSpec, data: &[f64]) -> Vec<f64> {
    let (nx, ny) = (domain.nx, domain.ny);
    let mut spec = t.forward_vec(data);
    for m in 0..nx {
        let k = derivative_factor(m, nx, domain.lx);
        for j in 0..ny {
            spec[m * ny + j] *= Complex64::new(0.0, k);
        }
    }
    t.inverse_vec(&spec)
}

/// `∂y` on one column of `ny` values.
#[inline]
pub fn dy_column(col: &[f64], dy: f64, out: &mut [f64]) {
    let n = col.len();
    let c = 0.5 / dy;
    out[0] = c * (-3.0 * col[0] + 4.0 * col[1] - col[2]);
    for j in 1..n - 1 {
        out[j] = c * (col[j + 1] - col[j - 1]);
    }
    out[n - 1] = c * (3.0 * col[n - 1] - 4.0 * col[n - 2] + col[n - 3]);
}

/// Same stencil on complex spectral columns.
#[inline]
pub fn dy_column_c(col: &[Complex64], dy: f64, out: &mut [Complex64]) {
    let n = col.len();
    let c = 0.5 / dy;
    out[0] = (col[0] * -3.0 + col[1] * 4.0 - col[2]) * c;
    for j in 1..n - 1 {
        out[j] = (col[j + 1] - col[j - 1]) * c;
    }
    out[n - 1] = (col[n - 1] * 3.0 - col[n - 2] * 4.0 + col[n - 3]) * c;
}

pub fn dy_data(domain: &DomainSpec, data: &[f64]) -> Vec<f64> {
    let ny = domain.ny;
    let dy = domain.dy();
    let mut out = vec![0.0; data.len()];
    for (col, o) in data.chunks(ny).zip(out.chunks_mut(ny)) {
        dy_column(col, dy, o);
    }
    out
}

pub fn dx(f: &ScalarField) -> ScalarField {
    ScalarField {
        domain: f.domain,
        time: f.time,
        data: dx_data(&f.domain, &f.data),
    }
}

pub fn dy(f: &ScalarField) -> ScalarField {
    ScalarField {
        domain: f.domain,
        time: f.time,
        data: dy_data(&f.domain, &f.data),
    }
}

/// `ω = ∂x v − ∂y u`.
pub fn curl(vel: &VelocityField) -> VorticityField {
    let d = vel.domain();
    let dvx = dx_data(d, &vel.v.data);
    let duy = dy_data(d, &vel.u.data);
    let data = dvx.iter().zip(&duy).map(|(a, b)| a - b).collect();
    VorticityField {
        w: ScalarField {
            domain: *d,
            time: vel.time(),
            data,
        },
    }
}

/// `∂x u + ∂y v` with the same stencils as [`curl`].
pub fn divergence(vel: &VelocityField) -> ScalarField {
    let d = vel.domain();
    let dux = dx_data(d, &vel.u.data);
    let dvy = dy_data(d, &vel.v.data);
    let data = dux.iter().zip(&dvy).map(|(a, b)| a + b).collect();
    ScalarField {
        domain: *d,
        time: vel.time(),
        data,
    }
}

/// Discrete gradient `(∂x φ, ∂y φ)` (no boundary masking).
pub fn gradient(phi: &ScalarField, nu: f64) -> VelocityField {
    VelocityField {
        u: dx(phi),
        v: dy(phi),
        nu,
    }
}

/// Perpendicular gradient `∇⊥ψ = (∂y ψ, −∂x ψ)`; exactly solenoidal for the discrete divergence.
pub fn perp_gradient(psi: &ScalarField, nu: f64) -> VelocityField {
    let mut v = dx(psi);
    v.scale(-1.0);
    VelocityField { u: dy(psi), v, nu }
}

/// `∫ |∇f|²` for one component: spectral x-derivative with trapezoidal y weights plus
/// edge-based forward differences in y. This is the quadratic form of the channel
/// diffusion operator, so the energy ledger and the stepper agree exactly.
pub fn dirichlet_form(f: &ScalarField) -> f64 {
    let d = &f.domain;
    let (ny, dx, dy) = (d.ny, d.dx(), d.dy());
    let wy = d.y_weights();
    let fx = dx_data(d, &f.data);
    let mut sx = 0.0;
    for (k, v) in fx.iter().enumerate() {
        sx += wy[k % ny] * v * v;
    }
    let mut sy = 0.0;
    for col in f.data.chunks(ny) {
        for j in 0..ny - 1 {
            let g = col[j + 1] - col[j];
            sy += g * g;
        }
    }
    dx * (sx + sy / dy)
}

/// `∫ |∇u|²` summed over velocity components.
pub fn velocity_dirichlet(vel: &VelocityField) -> f64 {
    dirichlet_form(&vel.u) + dirichlet_form(&vel.v)
}

/// `∫_{walls} |u|² dS` (both walls, tangential component only; `v` vanishes there).
pub fn wall_slip_energy(vel: &VelocityField) -> f64 {
    let d = vel.domain();
    let ny = d.ny;
    let mut s = 0.0;
    for i in 0..d.nx {
        let a = vel.u.data[i * ny];
        let b = vel.u.data[i * ny + ny - 1];
        s += a * a + b * b;
    }
    s * d.dx()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::domain::BcKind;
    use std::f64::consts::PI;

    fn dom(nx: usize, ny: usize) -> DomainSpec {
        DomainSpec::new(2.0, 1.0, nx, ny, 1.0, BcKind::NoSlip).unwrap()
    }

    #[test]
    fn curl_of_constant_is_zero() {
        let d = dom(16, 17);
        let vel = VelocityField {
            u: ScalarField::from_fn(&d, |_, _| 1.0),
            v: ScalarField::zeros(&d),
            nu: 0.0,
        };
        assert!(curl(&vel).w.max_abs() < 1e-13);
    }

    #[test]
    fn spectral_x_derivative_is_exact() {
        let d = dom(32, 9);
        let k = 2.0 * PI / d.lx;
        let vel = VelocityField {
            u: ScalarField::zeros(&d),
            v: ScalarField::from_fn(&d, |x, _| (k * x).sin()),
            nu: 0.0,
        };
        let w = curl(&vel);
        for i in 0..d.nx {
            for j in 0..d.ny {
                let exact = k * (k * d.x(i)).cos();
                assert!((w.w[(i, j)] - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn y_stencil_is_second_order() {
        let err = |ny: usize| {
            let d = dom(8, ny);
            let kh = 2.0 * PI / d.h;
            let vel = VelocityField {
                u: ScalarField::from_fn(&d, |_, y| (kh * y).sin()),
                v: ScalarField::zeros(&d),
                nu: 0.0,
            };
            let w = curl(&vel);
            let mut e = 0.0_f64;
            for j in 0..d.ny {
                let exact = -kh * (kh * d.y(j)).cos();
                e = e.max((w.w[(0, j)] - exact).abs());
            }
            e
        };
        let (e1, e2, e3) = (err(33), err(65), err(129));
        assert!((e1 / e2).log2() >= 1.9, "order {}", (e1 / e2).log2());
        assert!((e2 / e3).log2() >= 1.9);
    }

    #[test]
    fn divergence_examples() {
        let d = dom(16, 9);
        let k = 2.0 * PI / d.lx;
        let vel = VelocityField {
            u: ScalarField::from_fn(&d, |x, _| (k * x).sin()),
            v: ScalarField::zeros(&d),
            nu: 0.0,
        };
        let div = divergence(&vel);
        for i in 0..d.nx {
            assert!((div[(i, 3)] - k * (k * d.x(i)).cos()).abs() < 1e-12);
        }
        assert_eq!(divergence(&VelocityField::zeros(&d, 0.0)).max_abs(), 0.0);
    }

    #[test]
    fn perp_gradient_is_discretely_solenoidal() {
        let d = dom(16, 17);
        let psi = ScalarField::from_fn(&d, |x, y| (PI * x).cos() * (y * (1.0 - y)).powi(2) + y * y * y);
        let vel = perp_gradient(&psi, 0.0);
        assert!(divergence(&vel).max_abs() < 1e-11);
    }
}
