//! Exact decaying shear modes used to check the stepper.

use std::f64::consts::PI;

use super::forcing::ForcingSpec;
use super::run::{run_from, RunConfig, RunOutput};
use super::stepper::AdvectionForm;
use super::initial::InitSpec;
use crate::error::{Error, Result};
use crate::fields::{DomainSpec, ScalarField, VelocityField};

/// Smallest positive root of `λ tan(λH/2) = α`: the slowest symmetric shear mode
/// `cos(λ(y − H/2))` under the wall condition `∂_y u = ±α u`.
pub fn robin_lambda(alpha: f64, h: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("need alpha > 0 and H > 0, got {alpha}, {h}")));
    }
    let g = |l: f64| l * (0.5 * l * h).tan() - alpha;
    let (mut lo, mut hi) = (0.0, PI / h * (1.0 - 1e-15));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of integrating a shear mode and comparing with its exact decay.
#[derive(Clone, Debug)]
pub struct ModeError {
    pub l2_error: f64,
    pub exact_norm: f64,
    pub output: RunOutput,
}

fn shear_run(domain: DomainSpec, nu: f64, dt: f64, profile: impl Fn(f64) -> f64, rate: f64) -> Result<ModeError> {
    let cfg = RunConfig {
        domain,
        nu,
        dt,
        forcing: ForcingSpec::none(),
        init: InitSpec::StokesMode(1),
        snapshot_every: usize::MAX,
        out_dir: None,
        energy_fix: false,
        advection: AdvectionForm::SkewSymmetric,
    };
    let mut u = ScalarField::from_fn(&domain, |_, y| profile(y));
    if domain.bc == crate::fields::BcKind::NoSlip {
        for i in 0..domain.nx {
            u[(i, 0)] = 0.0;
            u[(i, domain.ny - 1)] = 0.0;
        }
    }
    let init = VelocityField::new(u, ScalarField::zeros(&domain), nu)?;
    let output = run_from(&cfg, init)?;
    let last = output.snapshots.last().expect("run keeps the final state");
    let decay = (-rate * last.time()).exp();
    let exact = ScalarField::from_fn(&domain, |_, y| profile(y) * decay);
    let mut e = last.u.clone();
    e.axpy(-1.0, &exact);
    Ok(ModeError {
        l2_error: (e.dot(&e) + last.v.dot(&last.v)).sqrt(),
        exact_norm: exact.l2_norm(),
        output,
    })
}

/// No-slip Stokes mode `u = sin(πy/H) e^{−ν(π/H)² t}`.
pub fn stokes_mode_error(domain: DomainSpec, nu: f64, dt: f64) -> Result<ModeError> {
    if domain.bc != crate::fields::BcKind::NoSlip {
        return Err(Error::InvalidArgument("Stokes mode oracle needs no-slip walls".into()));
    }
    let k = PI / domain.h;
    shear_run(domain, nu, dt, |y| (k * y).sin(), nu * k * k)
}

/// Navier-friction mode `u = cos(λ(y − H/2)) e^{−νλ² t}` with `λ` from [`robin_lambda`].
pub fn robin_mode_error(domain: DomainSpec, nu: f64, dt: f64) -> Result<(f64, ModeError)> {
    let lam = robin_lambda(domain.alpha(nu), domain.h)?;
    let h = domain.h;
    let m = shear_run(domain, nu, dt, |y| (lam * (y - 0.5 * h)).cos(), nu * lam * lam)?;
    Ok((lam, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BcKind;

    #[test]
    fn lambda_solves_the_transcendental_equation() {
        for alpha in [0.01, 1.0, 100.0] {
            let l = robin_lambda(alpha, PI).unwrap();
            assert!((l * (0.5 * l * PI).tan() - alpha).abs() < 1e-9 * alpha.max(1.0));
            assert!(l > 0.0 && l < 1.0);
        }
        assert!(robin_lambda(0.0, 1.0).is_err());
    }

    #[test]
    fn stokes_mode_is_second_order() {
        let d1 = DomainSpec::new(2.0 * PI, PI, 8, 17, 0.05, BcKind::NoSlip).unwrap();
        let d2 = DomainSpec::new(2.0 * PI, PI, 8, 33, 0.05, BcKind::NoSlip).unwrap();
        let e1 = stokes_mode_error(d1, 0.5, 2e-3).unwrap().l2_error;
        let e2 = stokes_mode_error(d2, 0.5, 1e-3).unwrap().l2_error;
        assert!(e1 / e2 > 3.6, "{e1} {e2}");
    }

    #[test]
    fn robin_mode_tracks_decay() {
        let d = DomainSpec::navier_friction(2.0 * PI, PI, 8, 33, 0.05, 1.0, 0.0).unwrap();
        let (_, m) = robin_mode_error(d, 0.5, 1e-3).unwrap();
        assert!(m.l2_error < 1e-3 * m.exact_norm, "{}", m.l2_error);
    }
}
