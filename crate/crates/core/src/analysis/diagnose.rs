//! Post-processing of a stored snapshot series on one subdomain.

use serde::{Deserialize, Serialize};

use super::equivalence::default_delta;
use super::fit::{fit_zeta2, sub_dissipation_check, SubDissipationVerdict, ZetaFit, GRADIENT_BOUND_FACTOR};
use crate::error::{Error, Result};
use crate::fields::ops::{curl, velocity_dirichlet};
use crate::fields::quadrature::RegionWeights;
use crate::fields::{Subdomain, VelocityField, VorticityField};
use crate::norms::{
    besov_norm_spacetime, l2_on, sobolev_norm_cutoff_spacetime, structure_function, trapezoid_in_time,
    verify_cutoff_inequality, Cutoff, CutoffCheck, IntegrationRegion, NormKind, NormReport, ShiftSet,
    StructureFunctionTable, CUTOFF_C_CAL,
};

/// Exponent used for the norms when the series admits no fit.
pub const FALLBACK_ZETA: f64 = 2.0 / 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseParams {
    pub region: Subdomain,
    pub directions: Vec<[f64; 2]>,
    pub magnitudes: usize,
    /// `δ = ζ₂/2 − eps` for the Sobolev norms.
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub nu: f64,
    pub zeta2: f64,
    pub c_u: Option<f64>,
    pub eta: Option<f64>,
    pub sub_dissipation: Option<SubDissipationVerdict>,
    pub gradient_bound_factor: f64,
    pub cutoff_c_cal: f64,
    /// Cutoff inequality on the last snapshot, per velocity component.
    pub cutoff: Vec<CutoffCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub table: StructureFunctionTable,
    pub fit: Option<ZetaFit>,
    pub fit_error: Option<String>,
    pub sigma: f64,
    pub delta: f64,
    /// Inner box of the cutoff: the region with a quarter of its height removed on each side.
    pub inner: Subdomain,
    pub norms: Vec<NormReport>,
    pub constants: Constants,
}

fn inner_box(region: &Subdomain, full_x: bool) -> Subdomain {
    let gy = 0.25 * (region.y_hi - region.y_lo);
    let gx = if full_x { 0.0 } else { 0.25 * (region.x_hi - region.x_lo) };
    Subdomain::new(region.x_lo + gx, region.x_hi - gx, region.y_lo + gy, region.y_hi - gy)
}

pub fn diagnose(snapshots: &[VelocityField], p: &DiagnoseParams) -> Result<Diagnosis> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::InvalidArgument("no snapshots to diagnose".into()))?;
    let d = *first.domain();
    let nu = first.nu;
    let shifts = ShiftSet::log_spaced(&d, &p.region, p.magnitudes, p.directions.clone())?;
    let table = structure_function(snapshots, &p.region, &shifts, IntegrationRegion::Full)?;
    let (fit, fit_error) = match fit_zeta2(&table, nu) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let zeta = fit.as_ref().map_or(FALLBACK_ZETA, |f| f.zeta2);
    let sigma = (0.5 * zeta).clamp(1e-3, 1.0 - 1e-3);
    let delta = default_delta(zeta, p.eps);

    let inner = inner_box(&p.region, p.region.is_full_strip(&d));
    let chi = Cutoff::new(&d, &p.region, &inner)?;
    let omega: Vec<VorticityField> = snapshots.iter().map(curl).collect();
    let times: Vec<f64> = snapshots.iter().map(|s| s.time()).collect();
    let w = RegionWeights::new(&d, &p.region)?;
    let l2_sq: Vec<f64> = snapshots.iter().map(|s| l2_on(s, &w).powi(2)).collect();
    let norms = vec![
        NormReport {
            kind: NormKind::L2,
            region: p.region,
            value: trapezoid_in_time(&times, &l2_sq).sqrt(),
            details: Vec::new(),
        },
        besov_norm_spacetime(snapshots, sigma, &p.region, &shifts)?,
        sobolev_norm_cutoff_spacetime(snapshots, delta, &chi)?,
        sobolev_norm_cutoff_spacetime(&omega, -1.0 + delta, &chi)?,
    ];

    let last = snapshots.last().expect("non-empty");
    let cutoff = [&last.u, &last.v]
        .into_iter()
        .map(|f| verify_cutoff_inequality(f, &chi, sigma, &shifts))
        .collect::<Result<Vec<_>>>()?;
    let dirichlet: Vec<f64> = snapshots.iter().map(velocity_dirichlet).collect();
    let d_bulk = nu * trapezoid_in_time(&times, &dirichlet);
    let sub_dissipation = fit
        .as_ref()
        .map(|f| sub_dissipation_check(&table, f, nu, d_bulk));
    let constants = Constants {
        nu,
        zeta2: zeta,
        c_u: fit.as_ref().map(|f| f.c_u),
        eta: fit.as_ref().map(|f| f.eta),
        sub_dissipation,
        gradient_bound_factor: GRADIENT_BOUND_FACTOR,
        cutoff_c_cal: CUTOFF_C_CAL,
        cutoff,
    };
    Ok(Diagnosis {
        table,
        fit,
        fit_error,
        sigma,
        delta,
        inner,
        norms,
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random::{random_velocity_sampled, Band, RandomSpectrum};
    use crate::fields::{BcKind, DomainSpec};
    use crate::norms::axis_directions;
    use std::f64::consts::PI;

    #[test]
    fn rough_field_diagnosis() {
        let d = DomainSpec::new(2.0 * PI, PI, 128, 65, 1.0, BcKind::NoSlip).unwrap();
        let u = random_velocity_sampled(
            &d,
            &RandomSpectrum {
                zeta: 0.5,
                band: Band::new(1.0, 40.0),
                seed: 3,
            },
            1e-6,
        )
        .unwrap();
        let p = DiagnoseParams {
            region: Subdomain::strip(&d, 0.25 * PI, 0.75 * PI),
            directions: axis_directions(),
            magnitudes: 10,
            eps: 0.05,
        };
        let g = diagnose(&[u], &p).unwrap();
        let f = g.fit.as_ref().unwrap();
        assert!(f.zeta2 > 0.2 && f.zeta2 < 1.0, "{}", f.zeta2);
        assert_eq!(g.norms.len(), 4);
        assert!(g.norms.iter().all(|n| n.value.is_finite() && n.value > 0.0));
        assert!(g.constants.cutoff.iter().all(|c| c.pass));
    }
}
