use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::forcing::ForcingSpec;
use super::initial::{make_initial, InitSpec};
use super::ledger::EnergyLedger;
use super::stepper::{AdvectionForm, Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::fields::{DomainSpec, VelocityField};
use crate::io::snapshot::save_snapshot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub nu: f64,
    pub dt: f64,
    pub forcing: ForcingSpec,
    pub init: InitSpec,
    pub snapshot_every: usize,
    /// Where to write `snap_XXXXXX.nsfld` and `energy.csv`; in-memory only when `None`.
    pub out_dir: Option<PathBuf>,
    pub energy_fix: bool,
    pub advection: AdvectionForm,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.forcing.validate(&self.domain)?;
        let mut errs = Vec::new();
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            errs.push(format!("nu must be positive, got {}", self.nu));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            errs.push(format!("dt must be positive, got {}", self.dt));
        }
        if self.snapshot_every == 0 {
            errs.push("snapshot_every must be >= 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(errs.join("; ")))
        }
    }

    /// Number of base steps to reach `t_final`.
    pub fn n_steps(&self) -> usize {
        (self.domain.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub snapshots: Vec<VelocityField>,
    pub ledger: EnergyLedger,
    pub steps: usize,
    pub energy_fixes: usize,
    /// Kinetic energy removed by the budget rescaling over the whole run.
    pub energy_removed: f64,
}

/// Integrates `cfg` to `t_final`, recording a snapshot every `snapshot_every` base steps
/// (plus the initial and final states).
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let init = make_initial(&cfg.init, &cfg.domain, cfg.nu)?;
    run_from(cfg, init)
}

/// As [`run`] with an explicit initial field.
pub fn run_from(cfg: &RunConfig, init: VelocityField) -> Result<RunOutput> {
    cfg.validate()?;
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let forcing = cfg.forcing.field(&cfg.domain)?;
    let mut stepper = Stepper::new(
        init,
        StepperConfig {
            nu: cfg.nu,
            forcing,
            energy_fix: cfg.energy_fix,
            advection: cfg.advection,
        },
    )?;
    let t0 = stepper.time();
    let n = cfg.n_steps();
    let mut snapshots = vec![stepper.state().clone()];
    let write = |k: usize, v: &VelocityField| -> Result<()> {
        if let Some(dir) = &cfg.out_dir {
            save_snapshot(&dir.join(format!("snap_{k:06}.nsfld")), v)?;
        }
        Ok(())
    };
    write(0, stepper.state())?;
    for k in 1..=n {
        let target = (t0 + k as f64 * cfg.dt).min(t0 + cfg.domain.t_final);
        let dt = target - stepper.time();
        stepper.advance(dt)?;
        if k % cfg.snapshot_every == 0 || k == n {
            snapshots.push(stepper.state().clone());
            write(k, stepper.state())?;
        }
    }
    let ledger = stepper.ledger.clone();
    if let Some(dir) = &cfg.out_dir {
        let p = dir.join("energy.csv");
        fs::write(&p, ledger.to_csv()).map_err(|e| Error::io(&p, e))?;
    }
    Ok(RunOutput {
        snapshots,
        ledger,
        steps: stepper.steps_taken(),
        energy_fixes: stepper.energy_fixes(),
        energy_removed: stepper.energy_removed(),
    })
}
