//! Two-sided comparison between the structure-function (Besov) bound on the velocity and
//! the negative Sobolev bound on the vorticity, on nested regions `U ⋑ W ⋑ V`.

use serde::{Deserialize, Serialize};

use super::fit::{InertialThresholds, Verdict};
use crate::error::{Error, Result};
use crate::fields::{curl, DomainSpec, RegionWeights, Subdomain, VelocityField, VorticityField};
use crate::norms::{
    besov_norm_spacetime, l2_on, sobolev_norm_cutoff_spacetime, trapezoid_in_time, Cutoff, ShiftSet,
};

/// Minimum clearance, in grid cells, between nested regions and between `U` and the walls.
pub const MIN_MARGIN_CELLS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedRegions {
    pub u: Subdomain,
    pub w: Subdomain,
    pub v: Subdomain,
}

impl NestedRegions {
    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        self.u.validate(domain)?;
        self.w.validate(domain)?;
        self.v.validate(domain)?;
        let gy = MIN_MARGIN_CELLS * domain.dy();
        let gx = MIN_MARGIN_CELLS * domain.dx();
        if self.u.margin(domain) < gy * (1.0 - 1e-9) {
            return Err(Error::Subdomain(format!("U lies within {MIN_MARGIN_CELLS} cells of a wall")));
        }
        for (outer, inner) in [(&self.u, &self.w), (&self.w, &self.v)] {
            let y_ok = inner.y_lo - outer.y_lo >= gy * (1.0 - 1e-9) && outer.y_hi - inner.y_hi >= gy * (1.0 - 1e-9);
            let x_ok = if outer.is_full_strip(domain) {
                true
            } else {
                !inner.is_full_strip(domain)
                    && inner.x_lo - outer.x_lo >= gx * (1.0 - 1e-9)
                    && outer.x_hi - inner.x_hi >= gx * (1.0 - 1e-9)
            };
            if !(x_ok && y_ok) {
                return Err(Error::Subdomain(format!(
                    "U ⋑ W ⋑ V needs margins of at least {MIN_MARGIN_CELLS} grid cells"
                )));
            }
        }
        Ok(())
    }

    /// Centered strips with `y` extents `[0.25, 0.75] H`, `[0.3, 0.7] H`, `[0.35, 0.65] H`.
    pub fn standard(domain: &DomainSpec) -> Self {
        let h = domain.h;
        NestedRegions {
            u: Subdomain::strip(domain, 0.25 * h, 0.75 * h),
            w: Subdomain::strip(domain, 0.3 * h, 0.7 * h),
            v: Subdomain::strip(domain, 0.35 * h, 0.65 * h),
        }
    }
}

/// `δ = min(ζ₂/2 − ε, 0.45)`, clipped into `(0, 1/2)`.
pub fn default_delta(zeta2: f64, eps: f64) -> f64 {
    (0.5 * zeta2 - eps).min(0.45).clamp(1e-3, 0.5 - 1e-3)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub zeta2: f64,
    pub delta: f64,
    /// `‖u‖_{L²(0,T;B^{ζ₂/2,∞}_2(U))}`.
    pub besov_u: f64,
    /// `‖χ_V ω‖_{L²(0,T;H^{−1+δ})}`, `χ_V = 1` on `V`, supported in `W`.
    pub vorticity_v: f64,
    /// `‖χ_V u‖_{L²(0,T;H^δ)}`.
    pub cutoff_velocity: f64,
    /// `‖χ_W ω‖_{L²(0,T;H^{−1+δ})}`, `χ_W = 1` on `W`, supported in `U`.
    pub vorticity_u: f64,
    /// `‖u‖_{L²(0,T;L²(U))}`.
    pub velocity_l2_u: f64,
    /// `vorticity_v / besov_u`.
    pub step1_ratio: f64,
    /// `cutoff_velocity / (vorticity_u + velocity_l2_u)`.
    pub step2_ratio: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

pub fn equivalence_report(
    snapshots: &[VelocityField],
    regions: &NestedRegions,
    zeta2: f64,
    delta: f64,
) -> Result<EquivalenceReport> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty snapshot series".into()))?;
    let d = *first.domain();
    regions.validate(&d)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidArgument(format!("δ = {delta} outside (0, 1/2)")));
    }
    if !(zeta2 > 0.0 && zeta2 < 2.0) {
        return Err(Error::InvalidArgument(format!("ζ₂ = {zeta2} outside (0, 2)")));
    }
    let chi_v = Cutoff::new(&d, &regions.w, &regions.v)?;
    let chi_w = Cutoff::new(&d, &regions.u, &regions.w)?;
    let shifts = ShiftSet::default_for(&d, &regions.u)?;
    let omega: Vec<VorticityField> = snapshots.iter().map(curl).collect();

    let besov_u = besov_norm_spacetime(snapshots, 0.5 * zeta2, &regions.u, &shifts)?.value;
    let vorticity_v = sobolev_norm_cutoff_spacetime(&omega, -1.0 + delta, &chi_v)?.value;
    let cutoff_velocity = sobolev_norm_cutoff_spacetime(snapshots, delta, &chi_v)?.value;
    let vorticity_u = sobolev_norm_cutoff_spacetime(&omega, -1.0 + delta, &chi_w)?.value;
    let w_u = RegionWeights::new(&d, &regions.u)?;
    let times: Vec<f64> = snapshots.iter().map(|s| s.time()).collect();
    let sq: Vec<f64> = snapshots.iter().map(|s| l2_on(s, &w_u).powi(2)).collect();
    let velocity_l2_u = trapezoid_in_time(&times, &sq).sqrt();
    Ok(EquivalenceReport {
        zeta2,
        delta,
        besov_u,
        vorticity_v,
        cutoff_velocity,
        vorticity_u,
        velocity_l2_u,
        step1_ratio: ratio(vorticity_v, besov_u),
        step2_ratio: ratio(cutoff_velocity, vorticity_u + velocity_l2_u),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityVerdict {
    pub verdict: Verdict,
    pub ratio: Option<f64>,
    pub values: Vec<Option<f64>>,
}

/// Bounded max/min ratio of a per-viscosity quantity (`None` = failed run).
pub fn uniformity_verdict(values: &[Option<f64>], th: &InertialThresholds) -> UniformityVerdict {
    let have: Vec<f64> = values.iter().flatten().copied().collect();
    if have.len() < 3 || have.len() < values.len() {
        return UniformityVerdict {
            verdict: Verdict::Insufficient,
            ratio: None,
            values: values.to_vec(),
        };
    }
    let max = have.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = have.iter().copied().fold(f64::INFINITY, f64::min);
    let r = if min > 0.0 { max / min } else if max == 0.0 { 1.0 } else { f64::INFINITY };
    UniformityVerdict {
        verdict: if r <= th.tol_growth { Verdict::Pass } else { Verdict::Fail },
        ratio: r.is_finite().then_some(r),
        values: values.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BcKind, ScalarField};
    use std::f64::consts::PI;

    #[test]
    fn zero_field_gives_zero_ratios() {
        let d = DomainSpec::new(2.0 * PI, PI, 64, 129, 1.0, BcKind::NoSlip).unwrap();
        let z = VelocityField::zeros(&d, 0.01);
        let rep = equivalence_report(&[z.clone(), { let mut a = z; a.set_time(1.0); a }], &NestedRegions::standard(&d), 1.0, 0.45)
            .unwrap();
        assert_eq!(rep.step1_ratio, 0.0);
        assert_eq!(rep.step2_ratio, 0.0);
    }

    #[test]
    fn thin_margins_rejected() {
        let d = DomainSpec::new(2.0 * PI, PI, 32, 17, 1.0, BcKind::NoSlip).unwrap();
        let h = d.h;
        let r = NestedRegions {
            u: Subdomain::strip(&d, 0.3 * h, 0.7 * h),
            w: Subdomain::strip(&d, 0.32 * h, 0.68 * h),
            v: Subdomain::strip(&d, 0.4 * h, 0.6 * h),
        };
        assert!(r.validate(&d).is_err());
    }

    #[test]
    fn smooth_mode_step2_ratio_finite() {
        let d = DomainSpec::new(2.0 * PI, PI, 64, 129, 1.0, BcKind::NoSlip).unwrap();
        let psi = ScalarField::from_fn(&d, |x, y| (2.0 * x).cos() * (2.0 * y).sin() * y.sin());
        let u = crate::fields::ops::perp_gradient(&psi, 0.01);
        let rep = equivalence_report(&[u], &NestedRegions::standard(&d), 1.0, 0.45).unwrap();
        assert!(rep.step2_ratio.is_finite() && rep.step2_ratio > 0.0);
        assert!(rep.step1_ratio.is_finite() && rep.step1_ratio > 0.0);
    }

    #[test]
    fn uniformity() {
        let th = InertialThresholds::default();
        assert_eq!(uniformity_verdict(&[Some(1.0), Some(2.0), Some(2.5)], &th).verdict, Verdict::Pass);
        assert_eq!(uniformity_verdict(&[Some(1.0), Some(2.0), Some(4.0)], &th).verdict, Verdict::Fail);
        assert_eq!(uniformity_verdict(&[Some(1.0), None, Some(1.0)], &th).verdict, Verdict::Insufficient);
    }
}
