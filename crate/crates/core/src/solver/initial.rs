use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::projection::project;
use crate::error::{Error, Result};
use crate::fields::random::{random_velocity, RandomSpectrum};
use crate::fields::{DomainSpec, ScalarField, VelocityField};
use crate::io::snapshot::load_snapshot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    /// Random stream-function spectrum, projected and normalized to unit rms velocity.
    RandomSpectrum(RandomSpectrum),
    /// `u = (sin(nπy/H), 0)`.
    StokesMode(u32),
    FileSnapshot(PathBuf),
}

/// Builds the initial velocity for `init` on `domain`.
pub fn make_initial(init: &InitSpec, domain: &DomainSpec, nu: f64) -> Result<VelocityField> {
    domain.validate()?;
    let vel = match init {
        InitSpec::RandomSpectrum(spec) => {
            let mut u = random_velocity(domain, spec, nu)?;
            for i in 0..domain.nx {
                for j in [0, domain.ny - 1] {
                    u.u[(i, j)] = 0.0;
                    u.v[(i, j)] = 0.0;
                }
            }
            let mut u = project(&u)?;
            let rms = (u.dot(&u) / domain.area()).sqrt();
            if rms == 0.0 {
                return Err(Error::InvalidArgument("random spectrum band holds no modes".into()));
            }
            u.scale(1.0 / rms);
            u
        }
        InitSpec::StokesMode(n) => {
            if *n == 0 {
                return Err(Error::InvalidArgument("Stokes mode index must be >= 1".into()));
            }
            let k = std::f64::consts::PI * *n as f64 / domain.h;
            let mut u = ScalarField::from_fn(domain, |_, y| (k * y).sin());
            for i in 0..domain.nx {
                u[(i, 0)] = 0.0;
                u[(i, domain.ny - 1)] = 0.0;
            }
            VelocityField {
                u,
                v: ScalarField::zeros(domain),
                nu,
            }
        }
        InitSpec::FileSnapshot(path) => {
            let mut vel = load_snapshot(path)?;
            if !vel.domain().same_grid(domain) {
                return Err(Error::InvalidArgument(format!(
                    "snapshot {} grid does not match the configured domain",
                    path.display()
                )));
            }
            vel.u.domain = *domain;
            vel.v.domain = *domain;
            vel.nu = nu;
            vel.set_time(0.0);
            vel
        }
    };
    vel.check_invariants()?;
    Ok(vel)
}
