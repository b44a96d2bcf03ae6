//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use nslab::fields::random::{random_velocity, Band, RandomSpectrum};
use nslab::{DomainSpec, VelocityField};

/// Reference channel `2π × π` with Navier-friction walls.
pub fn channel(nx: usize, ny: usize) -> DomainSpec {
    DomainSpec::navier_friction(2.0 * PI, PI, nx, ny, 1.0, 0.01, 1.0).expect("valid grid")
}

/// Divergence-free random velocity with a `k^{-(1+ζ)/2}` amplitude over `[1, 12]`.
pub fn velocity(d: &DomainSpec, seed: u64) -> VelocityField {
    let spec = RandomSpectrum {
        zeta: 2.0 / 3.0,
        band: Band::new(1.0, 12.0),
        seed,
    };
    random_velocity(d, &spec, 1e-3).expect("valid spectrum")
}
