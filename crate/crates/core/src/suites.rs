//! Self-contained property suites behind `nslab verify`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analysis::{equivalence_report, NestedRegions};
use crate::error::Result;
use crate::fields::random::{random_velocity, Band, RandomSpectrum};
use crate::fields::{BcKind, DomainSpec, Subdomain};
use crate::norms::{band_limited_ensemble, verify_embedding_chain, EmbeddingParams, EmbeddingReport};
use crate::solver::oracle::{robin_mode_error, stokes_mode_error};
use crate::solver::{run, AdvectionForm, ForcingSpec, InitSpec, RunConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail,
        });
    }
}

/// Calibration ensemble for the embedding chain: 200 band-limited scalar fields with
/// amplitude `|k|^{-1.75}` on a 128×65 channel, band `[1, 16]` against `[1, 32]`.
pub struct EmbeddingSuite {
    pub domain: DomainSpec,
    pub params: EmbeddingParams,
    pub members: usize,
    pub seed0: u64,
    pub exponent: f64,
    pub coarse: Band,
    pub fine: Band,
}

impl EmbeddingSuite {
    pub fn reference() -> Self {
        let domain = DomainSpec::new(2.0 * PI, PI, 128, 65, 1.0, BcKind::NoSlip).expect("valid grid");
        EmbeddingSuite {
            params: EmbeddingParams {
                s: 0.5,
                eps: 0.1,
                q: 2.5,
                outer: Subdomain::strip(&domain, 0.2 * PI, 0.8 * PI),
                inner: Subdomain::strip(&domain, 0.35 * PI, 0.65 * PI),
            },
            domain,
            members: 200,
            seed0: 1000,
            exponent: 1.75,
            coarse: Band::new(1.0, 16.0),
            fine: Band::new(1.0, 32.0),
        }
    }

    pub fn run(&self) -> Result<EmbeddingReport> {
        let coarse = band_limited_ensemble(&self.domain, self.coarse, self.members, self.seed0, self.exponent)?;
        let fine = band_limited_ensemble(&self.domain, self.fine, self.members, self.seed0, self.exponent)?;
        verify_embedding_chain(&coarse, &fine, self.params)
    }
}

pub fn embeddings() -> Result<SuiteOutcome> {
    let rep = EmbeddingSuite::reference().run()?;
    let mut out = SuiteOutcome {
        suite: "embeddings".into(),
        checks: Vec::new(),
    };
    for e in &rep.embeddings {
        out.push(
            &e.name,
            e.finite && e.stable,
            format!(
                "constant {:.4} -> {:.4} (relative change {:.3})",
                e.constant_coarse, e.constant_fine, e.relative_change
            ),
        );
    }
    out.push(
        "cutoff product estimate",
        rep.cutoff_pass,
        format!("max ratio {:.4} <= {}", rep.cutoff_max_ratio, rep.cutoff_c_cal),
    );
    Ok(out)
}

/// Step-2 ratio spread over a rough ensemble must stay within this factor.
pub const STEP2_SPREAD_MAX: f64 = 10.0;

pub fn equivalence() -> Result<SuiteOutcome> {
    let d = DomainSpec::new(2.0 * PI, PI, 256, 129, 1.0, BcKind::NoSlip)?;
    let regions = NestedRegions::standard(&d);
    let mut out = SuiteOutcome {
        suite: "equivalence".into(),
        checks: Vec::new(),
    };
    let mut ratios = Vec::new();
    for seed in 0..32 {
        let spec = RandomSpectrum {
            zeta: 0.5,
            band: Band::new(1.0, 64.0),
            seed,
        };
        let u = random_velocity(&d, &spec, 1e-3)?;
        let r = equivalence_report(&[u], &regions, 0.5, 0.2)?;
        ratios.push(r.step2_ratio);
    }
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(
        "step-2 ratio stable over 32 rough fields",
        min > 0.0 && max.is_finite() && max / min <= STEP2_SPREAD_MAX,
        format!("min {min:.4}, max {max:.4}, spread {:.3}", max / min),
    );
    Ok(out)
}

pub fn solver() -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome {
        suite: "solver".into(),
        checks: Vec::new(),
    };
    let coarse = DomainSpec::new(2.0 * PI, PI, 16, 129, 0.1, BcKind::NoSlip)?;
    let fine = DomainSpec { ny: 257, ..coarse };
    let e1 = stokes_mode_error(coarse, 0.01, 1e-4)?.l2_error;
    let e2 = stokes_mode_error(fine, 0.01, 5e-5)?.l2_error;
    out.push("Stokes mode error", e1 <= 1e-6, format!("L2 error {e1:.3e}"));
    out.push("Stokes mode order", e1 / e2 >= 3.6, format!("ratio {:.3}", e1 / e2));

    let nf = DomainSpec::navier_friction(2.0 * PI, PI, 16, 129, 0.1, 1.0, 0.0)?;
    let (lam, m) = robin_mode_error(nf, 0.01, 1e-4)?;
    out.push(
        "Navier-friction mode error",
        m.l2_error <= 1e-6,
        format!("lambda {lam:.6}, L2 error {:.3e}", m.l2_error),
    );

    for bc in [BcKind::NoSlip, BcKind::NavierFriction] {
        let mut domain = DomainSpec::navier_friction(2.0 * PI, PI, 64, 33, 0.2, 0.01, 1.0)?;
        domain.bc = bc;
        let cfg = RunConfig {
            domain,
            nu: 2e-3,
            dt: 1e-3,
            forcing: ForcingSpec::steady(0.5, 2, 3),
            init: InitSpec::RandomSpectrum(RandomSpectrum {
                zeta: 2.0 / 3.0,
                band: Band::new(1.0, 8.0),
                seed: 11,
            }),
            snapshot_every: 20,
            out_dir: None,
            energy_fix: true,
            advection: AdvectionForm::SkewSymmetric,
        };
        let a = run(&cfg)?;
        let b = run(&cfg)?;
        let v = a.ledger.max_relative_violation();
        out.push(
            &format!("energy inequality ({bc:?})"),
            v <= 1e-8,
            format!("max violation {v:.3e} E(0), {} rescalings", a.energy_fixes),
        );
        let same = a.snapshots == b.snapshots;
        out.push(&format!("deterministic rerun ({bc:?})"), same, String::new());
        let inv = a.snapshots.iter().try_for_each(|s| s.check_invariants());
        out.push(
            &format!("solenoidal snapshots ({bc:?})"),
            inv.is_ok(),
            inv.err().map(|e| e.to_string()).unwrap_or_default(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_suite_passes() {
        let s = solver().unwrap();
        for c in &s.checks {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }
}
