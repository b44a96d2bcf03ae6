use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::bump::bump;
use crate::fields::ops::perp_gradient;
use crate::fields::{DomainSpec, ScalarField, VelocityField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingKind {
    None,
    SteadySolenoidal,
}

/// Time-independent body force `f = ∇⊥ψ_f`,
/// `ψ_f = cos(2π kx x / Lx) · sin(π ky y / H) · bump((y − H/2) / 0.4H)`, scaled so that
/// `max |f| = amplitude`. Its y-support lies inside `[0.1H, 0.9H]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingSpec {
    pub kind: ForcingKind,
    pub amplitude: f64,
    pub mode: (u32, u32),
}

impl Default for ForcingSpec {
    fn default() -> Self {
        ForcingSpec::none()
    }
}

impl ForcingSpec {
    pub fn none() -> Self {
        ForcingSpec {
            kind: ForcingKind::None,
            amplitude: 0.0,
            mode: (1, 1),
        }
    }

    pub fn steady(amplitude: f64, kx: u32, ky: u32) -> Self {
        ForcingSpec {
            kind: ForcingKind::SteadySolenoidal,
            amplitude,
            mode: (kx, ky),
        }
    }

    pub fn is_none(&self) -> bool {
        self.kind == ForcingKind::None || self.amplitude == 0.0
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        if self.kind == ForcingKind::SteadySolenoidal {
            if !self.amplitude.is_finite() {
                return Err(Error::InvalidArgument("forcing amplitude must be finite".into()));
            }
            if self.mode.0 as usize >= domain.nx / 3 || self.mode.1 as usize >= domain.ny / 3 {
                return Err(Error::InvalidArgument(format!(
                    "forcing mode {:?} is not well resolved on a {}x{} grid",
                    self.mode, domain.nx, domain.ny
                )));
            }
        }
        Ok(())
    }

    /// Force field on the grid (zero for `None`).
    pub fn field(&self, domain: &DomainSpec) -> Result<VelocityField> {
        self.validate(domain)?;
        if self.is_none() {
            return Ok(VelocityField::zeros(domain, 0.0));
        }
        let kx = 2.0 * std::f64::consts::PI * self.mode.0 as f64 / domain.lx;
        let ky = std::f64::consts::PI * self.mode.1 as f64 / domain.h;
        let h = domain.h;
        let psi = ScalarField::from_fn(domain, |x, y| {
            (kx * x).cos() * (ky * y).sin() * bump((y - 0.5 * h) / (0.4 * h))
        });
        let mut f = perp_gradient(&psi, 0.0);
        let m = f.max_speed();
        if m > 0.0 {
            f.scale(self.amplitude / m);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{divergence, BcKind};

    #[test]
    fn force_is_solenoidal_and_interior() {
        let d = DomainSpec::new(6.0, 3.0, 32, 65, 1.0, BcKind::NoSlip).unwrap();
        let f = ForcingSpec::steady(2.0, 2, 3).field(&d).unwrap();
        assert!((f.max_speed() - 2.0).abs() < 1e-12);
        assert!(divergence(&f).max_abs() <= 1e-10 * f.l2_norm());
        for i in 0..d.nx {
            for j in 0..d.ny {
                let y = d.y(j);
                if y < 0.1 * d.h - d.dy() || y > 0.9 * d.h + d.dy() {
                    assert_eq!(f.u[(i, j)], 0.0);
                    assert_eq!(f.v[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn none_is_zero() {
        let d = DomainSpec::new(6.0, 3.0, 16, 17, 1.0, BcKind::NoSlip).unwrap();
        assert_eq!(ForcingSpec::none().field(&d).unwrap().max_speed(), 0.0);
    }
}
