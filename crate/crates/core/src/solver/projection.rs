//! Discrete Leray projection onto fields with zero discrete divergence.
//!
//! `P = I − G L⁻¹ D` with `D` the divergence used everywhere else, `G` the discrete
//! gradient with its wall-normal component (and, for no-slip walls, its tangential
//! component) masked on the wall rows, and `L = D G` factored once per x-mode. `D P = 0`
//! holds to solver round-off, `P G = 0`, and `P` is idempotent.

use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::fields::linalg::DenseLu;
use crate::fields::ops::dy_column_c;
use crate::fields::spectral::{derivative_factor, hermitian_fill, XTransform};
use crate::fields::{BcKind, DomainSpec, ScalarField, VelocityField};

pub struct Projector {
    domain: DomainSpec,
    mask_u: Vec<f64>,
    mask_v: Vec<f64>,
    /// One factorization per mode `1 ≤ m < nx/2`; index 0 unused.
    lu: Vec<Option<DenseLu>>,
}

fn dy_matrix(ny: usize, dy: f64) -> Vec<f64> {
    let c = 0.5 / dy;
    let mut a = vec![0.0; ny * ny];
    a[0] = -3.0 * c;
    a[1] = 4.0 * c;
    a[2] = -c;
    for j in 1..ny - 1 {
        a[j * ny + j - 1] = -c;
        a[j * ny + j + 1] = c;
    }
    let r = (ny - 1) * ny;
    a[r + ny - 3] = c;
    a[r + ny - 2] = -4.0 * c;
    a[r + ny - 1] = 3.0 * c;
    a
}

impl Projector {
    pub fn new(domain: &DomainSpec) -> Result<Self> {
        let (nx, ny) = (domain.nx, domain.ny);
        let mut mask_v = vec![1.0; ny];
        mask_v[0] = 0.0;
        mask_v[ny - 1] = 0.0;
        let mask_u = match domain.bc {
            BcKind::NoSlip => mask_v.clone(),
            BcKind::NavierFriction => vec![1.0; ny],
        };
        let d = dy_matrix(ny, domain.dy());
        // Dy · diag(mask_v) · Dy
        let mut dmd = vec![0.0; ny * ny];
        for r in 0..ny {
            for k in 0..ny {
                let a = d[r * ny + k] * mask_v[k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..ny {
                    dmd[r * ny + c] += a * d[k * ny + c];
                }
            }
        }
        let mut lu = Vec::with_capacity(nx / 2);
        lu.push(None);
        for m in 1..nx / 2 {
            let k = derivative_factor(m, nx, domain.lx);
            let mut a = dmd.clone();
            for j in 0..ny {
                a[j * ny + j] -= k * k * mask_u[j];
            }
            lu.push(Some(DenseLu::new(a, ny)?));
        }
        Ok(Projector {
            domain: *domain,
            mask_u,
            mask_v,
            lu,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    /// Projects spectral data in place (x-modes in FFT order, layout `[m * ny + j]`).
    pub fn apply_spectral(&self, uh: &mut [Complex64], vh: &mut [Complex64]) {
        let (nx, ny) = (self.domain.nx, self.domain.ny);
        let dy = self.domain.dy();
        let mut dv = vec![Complex64::default(); ny];
        let mut rhs = vec![Complex64::default(); ny];
        for m in 0..=nx / 2 {
            let col_u = m * ny..(m + 1) * ny;
            if m == 0 || m == nx / 2 {
                // Only v carries divergence in these modes; its solenoidal part vanishes.
                vh[col_u].iter_mut().for_each(|c| *c = Complex64::default());
                continue;
            }
            let ik = Complex64::new(0.0, derivative_factor(m, nx, self.domain.lx));
            dy_column_c(&vh[col_u.clone()], dy, &mut dv);
            for j in 0..ny {
                rhs[j] = uh[m * ny + j] * ik + dv[j];
            }
            let phi = self.lu[m].as_ref().expect("mode factorized").solve(&rhs);
            dy_column_c(&phi, dy, &mut dv);
            for j in 0..ny {
                uh[m * ny + j] -= ik * phi[j] * self.mask_u[j];
                vh[m * ny + j] -= dv[j] * self.mask_v[j];
            }
        }
        hermitian_fill(uh, nx, ny);
        hermitian_fill(vh, nx, ny);
    }

    pub fn apply(&self, vel: &VelocityField) -> VelocityField {
        let d = self.domain;
        let mut t = XTransform::new(d.nx, d.ny);
        let mut uh = t.forward_vec(&vel.u.data);
        let mut vh = t.forward_vec(&vel.v.data);
        self.apply_spectral(&mut uh, &mut vh);
        let mut v = t.inverse_vec(&vh);
        for i in 0..d.nx {
            v[i * d.ny] = 0.0;
            v[i * d.ny + d.ny - 1] = 0.0;
        }
        VelocityField {
            u: ScalarField {
                domain: d,
                time: vel.time(),
                data: t.inverse_vec(&uh),
            },
            v: ScalarField {
                domain: d,
                time: vel.time(),
                data: v,
            },
            nu: vel.nu,
        }
    }
}

/// One-shot projection; builds the per-mode factorizations each call.
pub fn project(vel: &VelocityField) -> Result<VelocityField> {
    Ok(Projector::new(vel.domain())?.apply(vel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ops::{divergence, gradient};
    use std::f64::consts::PI;

    fn dom(bc: BcKind) -> DomainSpec {
        match bc {
            BcKind::NoSlip => DomainSpec::new(2.0 * PI, PI, 32, 33, 1.0, bc).unwrap(),
            BcKind::NavierFriction => DomainSpec::navier_friction(2.0 * PI, PI, 32, 33, 1.0, 0.5, 1.0).unwrap(),
        }
    }

    fn rough(d: &DomainSpec) -> VelocityField {
        let mut u = ScalarField::from_fn(d, |x, y| (2.0 * x).sin() * y + (x - y).cos() + 0.3);
        let mut v = ScalarField::from_fn(d, |x, y| (3.0 * x + 1.0).cos() * (y * (PI - y)) + y.sin() * x.sin());
        for i in 0..d.nx {
            v[(i, 0)] = 0.0;
            v[(i, d.ny - 1)] = 0.0;
            if d.bc == BcKind::NoSlip {
                u[(i, 0)] = 0.0;
                u[(i, d.ny - 1)] = 0.0;
            }
        }
        VelocityField { u, v, nu: 0.0 }
    }

    fn diff(a: &VelocityField, b: &VelocityField) -> f64 {
        let mut c = a.clone();
        c.axpy(-1.0, b);
        c.l2_norm()
    }

    #[test]
    fn projection_is_solenoidal_and_idempotent() {
        for bc in [BcKind::NoSlip, BcKind::NavierFriction] {
            let d = dom(bc);
            let p = Projector::new(&d).unwrap();
            let w = rough(&d);
            let pw = p.apply(&w);
            assert!(divergence(&pw).max_abs() <= 1e-10 * pw.l2_norm(), "{bc:?}");
            pw.check_invariants().unwrap();
            let ppw = p.apply(&pw);
            assert!(diff(&ppw, &pw) <= 1e-10 * pw.l2_norm());
        }
    }

    #[test]
    fn discrete_gradients_are_removed() {
        for bc in [BcKind::NoSlip, BcKind::NavierFriction] {
            let d = dom(bc);
            let mut phi = ScalarField::from_fn(&d, |x, y| (x.cos() + (2.0 * x).sin()) * (2.0 * y).cos() + y * y);
            // zero one-sided wall derivative so the gradient is impermeable
            for i in 0..d.nx {
                let n = d.ny;
                phi[(i, 0)] = (4.0 * phi[(i, 1)] - phi[(i, 2)]) / 3.0;
                phi[(i, n - 1)] = (4.0 * phi[(i, n - 2)] - phi[(i, n - 3)]) / 3.0;
            }
            let mut g = gradient(&phi, 0.0);
            for i in 0..d.nx {
                g.v[(i, 0)] = 0.0;
                g.v[(i, d.ny - 1)] = 0.0;
                if bc == BcKind::NoSlip {
                    g.u[(i, 0)] = 0.0;
                    g.u[(i, d.ny - 1)] = 0.0;
                }
            }
            let pg = project(&g).unwrap();
            assert!(pg.l2_norm() <= 1e-8 * g.l2_norm(), "{bc:?}: {}", pg.l2_norm() / g.l2_norm());
        }
    }

    #[test]
    fn solenoidal_field_unchanged() {
        let d = dom(BcKind::NoSlip);
        let psi = ScalarField::from_fn(&d, |x, y| x.sin() * (y * (PI - y)).powi(3));
        let u = crate::fields::ops::perp_gradient(&psi, 0.0);
        let mut u = u;
        for i in 0..d.nx {
            u.u[(i, 0)] = 0.0;
            u.u[(i, d.ny - 1)] = 0.0;
        }
        let u = project(&u).unwrap();
        let pu = project(&u).unwrap();
        assert!(diff(&pu, &u) <= 1e-10 * u.l2_norm());
    }
}
