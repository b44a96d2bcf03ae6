//! Wall-bounded 2D Navier–Stokes laboratory: a channel solver with no-slip and
//! Navier-friction walls, local norm diagnostics, and vanishing-viscosity sweeps.

pub mod analysis;
pub mod error;
pub mod fields;
pub mod io;
pub mod norms;
pub mod solver;
pub mod suites;

pub use error::{Error, Result};
pub use fields::{
    curl, divergence, poisson_solve_channel, restrict, shift_sample, stream_function, BcKind,
    DomainSpec, ScalarField, Subdomain, VelocityField, VorticityField, WallCondition,
};
