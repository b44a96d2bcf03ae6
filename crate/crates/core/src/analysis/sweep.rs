//! Vanishing-viscosity sweep: one run per viscosity from a common initial state, then every
//! diagnostic per run and across runs.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anomaly::{average_series, dissipation_anomaly, limit_besov_check, AnomalyEstimate, LimitBesovCheck};
use super::equivalence::{default_delta, equivalence_report, uniformity_verdict, EquivalenceReport, NestedRegions, UniformityVerdict};
use super::fit::{
    check_inertial_condition, fit_zeta2, sub_dissipation_check, InertialThresholds, InertialVerdict,
    SubDissipationVerdict, Verdict, ZetaFit,
};
use super::testfields::{euler_residual, weak_pairing, Residuals, TestFieldBank};
use crate::error::{Error, Result};
use crate::fields::random::{Band, RandomSpectrum};
use crate::fields::{DomainSpec, VelocityField};
use crate::norms::{axis_directions, structure_function, IntegrationRegion, ShiftSet, StructureFunctionTable};
use crate::solver::{run, AdvectionForm, EnergyLedger, ForcingSpec, InitSpec, RunConfig};

/// Marker used wherever a cross-viscosity quantity cannot be formed.
pub const INSUFFICIENT: &str = "insufficient data";

/// Minimum log-log slope of `max_j |V_j|` against `ν` (heuristic reading of `|V_j| ≲ √ν`).
pub const VISCOUS_SLOPE_MIN: f64 = 0.45;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub domain: DomainSpec,
    pub nus: Vec<f64>,
    pub dt: f64,
    pub snapshot_every: usize,
    pub init: InitSpec,
    pub forcing: ForcingSpec,
    pub energy_fix: bool,
    pub advection: AdvectionForm,
    pub regions: NestedRegions,
    /// Number of log-spaced magnitudes of the (axis-direction) fitting shift set.
    pub fit_magnitudes: usize,
    pub thresholds: InertialThresholds,
    /// `δ = ζ₂/2 − eps` for the vorticity norm.
    pub eps: f64,
    /// Test-field radius as a fraction of `H`.
    pub test_rho: f64,
    /// Test-field half-width in time as a fraction of `T`.
    pub test_tau: f64,
    /// Per-viscosity snapshot directories `nu_<k>` are created below this path when set.
    pub snapshot_dir: Option<PathBuf>,
}

impl SweepConfig {
    /// Six viscosities `10⁻²·2^{−k}`, 256×129 channel `[0, 2π) × [0, π]`, `T = 1`, Navier
    /// friction with `α = 0.01 ν^{−1}`, random initial data with unit rms velocity.
    pub fn reference() -> Self {
        let domain = DomainSpec::navier_friction(
            2.0 * std::f64::consts::PI,
            std::f64::consts::PI,
            256,
            129,
            1.0,
            0.01,
            1.0,
        )
        .expect("reference domain is valid");
        SweepConfig {
            regions: NestedRegions::standard(&domain),
            domain,
            nus: (0..6).map(|k| 1e-2 * 0.5f64.powi(k)).collect(),
            dt: 5e-4,
            snapshot_every: 50,
            init: InitSpec::RandomSpectrum(RandomSpectrum {
                zeta: 2.0 / 3.0,
                band: Band::new(1.0, 12.0),
                seed: 5,
            }),
            forcing: ForcingSpec::none(),
            energy_fix: true,
            advection: AdvectionForm::SkewSymmetric,
            fit_magnitudes: 12,
            thresholds: InertialThresholds::default(),
            eps: 0.05,
            test_rho: 0.3,
            test_tau: 0.2,
            snapshot_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if let Err(e) = self.domain.validate() {
            errs.push(e.to_string());
        }
        if self.nus.iter().any(|nu| !(*nu > 0.0 && nu.is_finite())) {
            errs.push("every viscosity must be positive and finite".into());
        }
        let mut sorted = self.nus.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            errs.push("viscosities must be distinct".into());
        }
        if !(self.dt > 0.0) {
            errs.push(format!("dt must be positive, got {}", self.dt));
        }
        if self.snapshot_every == 0 {
            errs.push("snapshot_every must be >= 1".into());
        }
        if self.fit_magnitudes < 6 {
            errs.push(format!("fit_magnitudes must be >= 6, got {}", self.fit_magnitudes));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            errs.push(format!("eps must lie in (0, 0.5), got {}", self.eps));
        }
        if !(self.test_rho > 0.0 && self.test_rho < 0.5) {
            errs.push(format!("test_rho must lie in (0, 0.5), got {}", self.test_rho));
        }
        if !(self.test_tau > 0.0 && self.test_tau <= 0.25) {
            errs.push(format!("test_tau must lie in (0, 0.25], got {}", self.test_tau));
        }
        if let Err(e) = self.regions.validate(&self.domain) {
            errs.push(e.to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Viscosities in decreasing order.
    pub fn sorted_nus(&self) -> Vec<f64> {
        let mut v = self.nus.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    fn run_config(&self, k: usize, nu: f64) -> RunConfig {
        RunConfig {
            domain: self.domain,
            nu,
            dt: self.dt,
            forcing: self.forcing,
            init: self.init.clone(),
            snapshot_every: self.snapshot_every,
            out_dir: self.snapshot_dir.as_ref().map(|d| d.join(format!("nu_{k}"))),
            energy_fix: self.energy_fix,
            advection: self.advection,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub e0: f64,
    pub e_final: f64,
    pub dissipation_bulk: f64,
    pub dissipation_wall: f64,
    pub force_work: f64,
    pub max_relative_violation: f64,
    pub steps: usize,
    pub energy_fixes: usize,
    pub energy_removed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuRecord {
    pub nu: f64,
    pub failed: Option<String>,
    pub fit: Option<ZetaFit>,
    pub sub_dissipation: Option<SubDissipationVerdict>,
    pub besov_u: Option<f64>,
    pub vorticity_norm: Option<f64>,
    pub equivalence: Option<EquivalenceReport>,
    pub ledger: Option<LedgerSummary>,
    pub pairings: Option<Vec<f64>>,
    pub residuals: Option<Residuals>,
    /// `max_j |V_j| / (√ν √D_bulk(T) ‖∇φ_j‖)` with the ledger dissipation.
    pub cauchy_schwarz_ratio: Option<f64>,
}

impl NuRecord {
    fn failed(nu: f64, msg: String) -> Self {
        NuRecord {
            nu,
            failed: Some(msg),
            fit: None,
            sub_dissipation: None,
            besov_u: None,
            vorticity_norm: None,
            equivalence: None,
            ledger: None,
            pairings: None,
            residuals: None,
            cauchy_schwarz_ratio: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Section<T> {
    Value(T),
    Missing(String),
}

impl<T> Section<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Section::Value(v) => Some(v),
            Section::Missing(_) => None,
        }
    }

    fn missing() -> Self {
        Section::Missing(INSUFFICIENT.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViscousDecay {
    pub slope: f64,
    pub max_abs_v: Vec<f64>,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossNu {
    pub zeta2_common: Section<f64>,
    pub delta: Section<f64>,
    pub inertial: InertialVerdict,
    pub vorticity_uniformity: Section<UniformityVerdict>,
    pub verdicts_agree: Section<bool>,
    /// `max_j |P^{ν_i}[j] − P^{ν_{i+1}}[j]|` for consecutive viscosities.
    pub cauchy_gaps: Section<Vec<f64>>,
    pub viscous_decay: Section<ViscousDecay>,
    pub cauchy_schwarz_all: Section<bool>,
    pub anomaly: Section<AnomalyEstimate>,
    pub limit_besov: Section<LimitBesovCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub nus: Vec<f64>,
    pub records: Vec<NuRecord>,
    pub cross: CrossNu,
}

/// In-memory products of a sweep that are not part of the JSON report.
pub struct SweepArtifacts {
    pub tables: Vec<Option<StructureFunctionTable>>,
    pub ledgers: Vec<Option<EnergyLedger>>,
}

struct RunData {
    snapshots: Vec<VelocityField>,
    ledger: EnergyLedger,
    summary: LedgerSummary,
    table: StructureFunctionTable,
    fit: ZetaFit,
}

fn simulate_and_fit(cfg: &SweepConfig, k: usize, nu: f64, shifts: &ShiftSet) -> Result<RunData> {
    let out = run(&cfg.run_config(k, nu))?;
    let l = &out.ledger;
    let summary = LedgerSummary {
        e0: l.e0(),
        e_final: l.kinetic.last().copied().unwrap_or(0.0),
        dissipation_bulk: l.dissipation_bulk.last().copied().unwrap_or(0.0),
        dissipation_wall: l.dissipation_wall.last().copied().unwrap_or(0.0),
        force_work: l.force_work.last().copied().unwrap_or(0.0),
        max_relative_violation: l.max_relative_violation(),
        steps: out.steps,
        energy_fixes: out.energy_fixes,
        energy_removed: out.energy_removed,
    };
    let table = structure_function(&out.snapshots, &cfg.regions.u, shifts, IntegrationRegion::Full)?;
    let fit = fit_zeta2(&table, nu)?;
    Ok(RunData {
        snapshots: out.snapshots,
        ledger: out.ledger,
        summary,
        table,
        fit,
    })
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<(SweepReport, SweepArtifacts)> {
    cfg.validate()?;
    let nus = cfg.sorted_nus();
    let fit_shifts = ShiftSet::log_spaced(&cfg.domain, &cfg.regions.u, cfg.fit_magnitudes, axis_directions())?;
    let besov_shifts = ShiftSet::default_for(&cfg.domain, &cfg.regions.u)?;
    let bank = TestFieldBank::with_widths(&cfg.domain, cfg.domain.t_final, cfg.test_rho, cfg.test_tau);

    let runs: Vec<std::result::Result<RunData, String>> = nus
        .par_iter()
        .enumerate()
        .map(|(k, &nu)| simulate_and_fit(cfg, k, nu, &fit_shifts).map_err(|e| e.to_string()))
        .collect();

    let fits: Vec<Option<ZetaFit>> = runs.iter().map(|r| r.as_ref().ok().map(|d| d.fit.clone())).collect();
    let zeta_common = fits.iter().flatten().map(|f| f.zeta2).fold(None, |m: Option<f64>, z| {
        Some(m.map_or(z, |m| m.min(z)))
    });
    let delta = zeta_common.map(|z| default_delta(z, cfg.eps));
    let forcing = cfg.forcing.field(&cfg.domain)?;

    let records: Vec<NuRecord> = nus
        .par_iter()
        .zip(runs.par_iter())
        .map(|(&nu, r)| {
            let data = match r {
                Ok(d) => d,
                Err(msg) => return NuRecord::failed(nu, msg.clone()),
            };
            let diag = || -> Result<NuRecord> {
                let z = zeta_common.expect("at least this run has a fit");
                let dl = delta.expect("delta follows zeta");
                let sub = sub_dissipation_check(&data.table, &data.fit, nu, data.summary.dissipation_bulk);
                let eq = equivalence_report(&data.snapshots, &cfg.regions, z, dl)?;
                let pairs = weak_pairing(&data.snapshots, &bank)?;
                let mut forcing_nu = forcing.clone();
                forcing_nu.nu = nu;
                let res = euler_residual(&data.snapshots, &forcing_nu, &bank)?;
                let cs = res.cauchy_schwarz_ratio(data.summary.dissipation_bulk);
                Ok(NuRecord {
                    nu,
                    failed: None,
                    fit: Some(data.fit.clone()),
                    sub_dissipation: Some(sub),
                    besov_u: Some(eq.besov_u),
                    vorticity_norm: Some(eq.vorticity_u),
                    equivalence: Some(eq),
                    ledger: Some(data.summary.clone()),
                    pairings: Some(pairs.totals),
                    residuals: Some(res),
                    cauchy_schwarz_ratio: Some(cs),
                })
            };
            diag().unwrap_or_else(|e| NuRecord::failed(nu, format!("diagnostics: {e}")))
        })
        .collect();

    let ok: Vec<&NuRecord> = records.iter().filter(|r| r.failed.is_none()).collect();
    let inertial = check_inertial_condition(
        &records.iter().map(|r| r.fit.clone()).collect::<Vec<_>>(),
        &cfg.thresholds,
    );
    let enough = records.len() >= 3;
    let vort_values: Vec<Option<f64>> = records.iter().map(|r| r.vorticity_norm).collect();
    let vorticity_uniformity = if enough {
        Section::Value(uniformity_verdict(&vort_values, &cfg.thresholds))
    } else {
        Section::missing()
    };
    let verdicts_agree = match vorticity_uniformity.value() {
        Some(v) if v.verdict != Verdict::Insufficient && inertial.verdict != Verdict::Insufficient => {
            Section::Value((v.verdict == Verdict::Pass) == (inertial.verdict == Verdict::Pass))
        }
        _ => Section::missing(),
    };
    let cauchy_gaps = if ok.len() >= 2 {
        Section::Value(
            ok.windows(2)
                .map(|w| {
                    let a = w[0].pairings.as_ref().expect("ok record");
                    let b = w[1].pairings.as_ref().expect("ok record");
                    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
                })
                .collect(),
        )
    } else {
        Section::missing()
    };
    let viscous_decay = if ok.len() >= 3 {
        let xs: Vec<f64> = ok.iter().map(|r| r.nu).collect();
        let ys: Vec<f64> = ok
            .iter()
            .map(|r| r.residuals.as_ref().expect("ok record").viscous.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            .collect();
        if ys.iter().all(|y| *y > 0.0) {
            let slope = loglog_slope(&xs, &ys);
            Section::Value(ViscousDecay {
                slope,
                pass: slope >= VISCOUS_SLOPE_MIN,
                max_abs_v: ys,
                note: "slope threshold is a heuristic reading of |V_j| <~ sqrt(nu)".into(),
            })
        } else {
            Section::missing()
        }
    } else {
        Section::missing()
    };
    let cauchy_schwarz_all = if ok.is_empty() {
        Section::missing()
    } else {
        Section::Value(ok.iter().all(|r| r.cauchy_schwarz_ratio.is_some_and(|c| c <= 1.0)))
    };
    let ok_idx: Vec<usize> = (0..records.len()).filter(|&k| records[k].failed.is_none()).collect();
    let anomaly = if ok_idx.len() >= 3 {
        let ls: Vec<EnergyLedger> = ok_idx
            .iter()
            .map(|&k| runs[k].as_ref().expect("ok run").ledger.clone())
            .collect();
        let ns: Vec<f64> = ok_idx.iter().map(|&k| nus[k]).collect();
        dissipation_anomaly(&ns, &ls).map_or_else(|_| Section::missing(), Section::Value)
    } else {
        Section::missing()
    };
    let limit_besov = match (ok_idx.len() >= 2, zeta_common) {
        (true, Some(z)) => {
            let a = &runs[ok_idx[ok_idx.len() - 2]].as_ref().expect("ok run").snapshots;
            let b = &runs[ok_idx[ok_idx.len() - 1]].as_ref().expect("ok run").snapshots;
            let per: Vec<f64> = ok.iter().filter_map(|r| r.besov_u).collect();
            average_series(a, b)
                .and_then(|p| limit_besov_check(&p, &cfg.regions.u, z, &besov_shifts, &per))
                .map_or_else(|_| Section::missing(), Section::Value)
        }
        _ => Section::missing(),
    };
    let cross = CrossNu {
        zeta2_common: zeta_common.map_or_else(Section::missing, Section::Value),
        delta: delta.map_or_else(Section::missing, Section::Value),
        inertial,
        vorticity_uniformity,
        verdicts_agree,
        cauchy_gaps,
        viscous_decay,
        cauchy_schwarz_all,
        anomaly,
        limit_besov,
    };
    let artifacts = SweepArtifacts {
        tables: runs.iter().map(|r| r.as_ref().ok().map(|d| d.table.clone())).collect(),
        ledgers: runs.iter().map(|r| r.as_ref().ok().map(|d| d.ledger.clone())).collect(),
    };
    Ok((
        SweepReport {
            config: cfg.clone(),
            nus,
            records,
            cross,
        },
        artifacts,
    ))
}
