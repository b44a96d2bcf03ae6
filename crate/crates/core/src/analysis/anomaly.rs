//! Dissipation trend across viscosities and the lower-semicontinuity check of the limit norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Subdomain, VelocityField};
use crate::norms::{besov_norm_spacetime, ShiftSet};
use crate::solver::EnergyLedger;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Vanishing,
    Plateau,
    Increasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalyEstimate {
    /// Decreasing viscosities.
    pub nus: Vec<f64>,
    /// `D_bulk(T) + D_wall(T)` per viscosity.
    pub dissipation: Vec<f64>,
    /// Aitken-extrapolated `ν → 0` limit from the three smallest viscosities.
    pub extrapolated: f64,
    pub trend: Trend,
}

/// Fraction of the largest dissipation below which the extrapolated limit counts as zero.
pub const VANISHING_FRACTION: f64 = 0.1;

/// Aitken `Δ²` on `(d₀, d₁, d₂)` ordered by decreasing viscosity; falls back to `d₂` when the
/// differences do not contract.
pub fn aitken_limit(d0: f64, d1: f64, d2: f64) -> f64 {
    let a = d1 - d0;
    let b = d2 - d1;
    let den = b - a;
    if den == 0.0 || (b / a).abs() >= 1.0 || !(b / a).is_finite() {
        d2
    } else {
        d2 - b * b / den
    }
}

pub fn dissipation_anomaly(nus: &[f64], ledgers: &[EnergyLedger]) -> Result<AnomalyEstimate> {
    if nus.len() != ledgers.len() {
        return Err(Error::InvalidArgument("one ledger per viscosity required".into()));
    }
    if nus.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 viscosities, got {}", nus.len())));
    }
    let mut idx: Vec<usize> = (0..nus.len()).collect();
    idx.sort_by(|&a, &b| nus[b].total_cmp(&nus[a]));
    let nus: Vec<f64> = idx.iter().map(|&k| nus[k]).collect();
    let t_end: Vec<f64> = idx.iter().map(|&k| ledgers[k].times.last().copied().unwrap_or(0.0)).collect();
    if t_end.iter().any(|t| (t - t_end[0]).abs() > 1e-9 * t_end[0].abs().max(1.0)) {
        return Err(Error::InvalidArgument("ledgers end at different times".into()));
    }
    let dissipation: Vec<f64> = idx.iter().map(|&k| ledgers[k].total_dissipation()).collect();
    let n = dissipation.len();
    let extrapolated = aitken_limit(dissipation[n - 3], dissipation[n - 2], dissipation[n - 1]);
    let d_max = dissipation.iter().copied().fold(0.0_f64, f64::max);
    let trend = if d_max == 0.0 {
        Trend::Vanishing
    } else if dissipation[n - 1] > dissipation[0] * (1.0 + VANISHING_FRACTION) {
        Trend::Increasing
    } else if extrapolated <= VANISHING_FRACTION * d_max {
        Trend::Vanishing
    } else {
        Trend::Plateau
    };
    Ok(AnomalyEstimate {
        nus,
        dissipation,
        extrapolated,
        trend,
    })
}

/// Snapshot-wise average of two series sampled at the same times.
pub fn average_series(a: &[VelocityField], b: &[VelocityField]) -> Result<Vec<VelocityField>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument("series must be non-empty and of equal length".into()));
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if (x.time() - y.time()).abs() > 1e-12 * x.time().abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "sample times differ: {} vs {}",
                    x.time(),
                    y.time()
                )));
            }
            let mut m = x.clone();
            m.axpy(1.0, y);
            m.scale(0.5);
            Ok(m)
        })
        .collect()
}

/// Slack on the per-viscosity maximum.
pub const LIMIT_SLACK: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitBesovCheck {
    pub sigma: f64,
    pub proxy_value: f64,
    pub max_per_nu: f64,
    pub pass: bool,
}

/// Besov norm of the weak-limit proxy compared with `(1 + 0.1) · max_ν` of the per-run values.
pub fn limit_besov_check(
    proxy: &[VelocityField],
    region: &Subdomain,
    zeta2: f64,
    shifts: &ShiftSet,
    per_nu: &[f64],
) -> Result<LimitBesovCheck> {
    let sigma = 0.5 * zeta2;
    let proxy_value = besov_norm_spacetime(proxy, sigma, region, shifts)?.value;
    let max_per_nu = per_nu.iter().copied().fold(0.0_f64, f64::max);
    Ok(LimitBesovCheck {
        sigma,
        proxy_value,
        max_per_nu,
        pass: proxy_value <= max_per_nu * (1.0 + LIMIT_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BcKind, DomainSpec, ScalarField};
    use std::f64::consts::PI;

    fn ledger(d: f64) -> EnergyLedger {
        let mut l = EnergyLedger::start(0.0, 1.0);
        l.push(
            1.0,
            1.0 - d,
            crate::solver::ledger::LedgerIncrement {
                bulk: d,
                wall: 0.0,
                work: 0.0,
            },
        );
        l
    }

    #[test]
    fn heat_mode_dissipation_vanishes() {
        let nus: Vec<f64> = (0..6).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
        let ls: Vec<EnergyLedger> = nus.iter().map(|nu| ledger(1.0 - (-2.0 * nu).exp())).collect();
        let a = dissipation_anomaly(&nus, &ls).unwrap();
        assert_eq!(a.trend, Trend::Vanishing);
        assert!(a.extrapolated.abs() < 1e-5);
    }

    #[test]
    fn constant_is_plateau_and_order_is_normalized() {
        let nus = [1e-3, 1e-2, 5e-3];
        let ls = [ledger(0.3), ledger(0.3), ledger(0.3)];
        let a = dissipation_anomaly(&nus, &ls).unwrap();
        assert_eq!(a.trend, Trend::Plateau);
        assert_eq!(a.nus, vec![1e-2, 5e-3, 1e-3]);
        let inc = dissipation_anomaly(&[1e-2, 5e-3, 2.5e-3], &[ledger(0.1), ledger(0.2), ledger(0.4)]).unwrap();
        assert_eq!(inc.trend, Trend::Increasing);
    }

    #[test]
    fn cancelling_proxy() {
        let d = DomainSpec::new(2.0 * PI, PI, 32, 33, 1.0, BcKind::NoSlip).unwrap();
        let psi = ScalarField::from_fn(&d, |x, y| x.sin() * y.sin().powi(3));
        let f = crate::fields::ops::perp_gradient(&psi, 0.01);
        let mut g = f.clone();
        g.scale(-1.0);
        let u = Subdomain::strip(&d, 0.8, 2.3);
        let s = ShiftSet::default_for(&d, &u).unwrap();
        let per = besov_norm_spacetime(&[f.clone()], 0.4, &u, &s).unwrap().value;
        let same = limit_besov_check(&average_series(&[f.clone()], &[f.clone()]).unwrap(), &u, 0.8, &s, &[per]).unwrap();
        assert!((same.proxy_value - per).abs() < 1e-12 * per && same.pass);
        let c = limit_besov_check(&average_series(&[f], &[g]).unwrap(), &u, 0.8, &s, &[per]).unwrap();
        assert_eq!(c.proxy_value, 0.0);
        assert!(c.pass);
    }
}
