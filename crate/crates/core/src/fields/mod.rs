//! Channel grid, fields, operators, transforms and subdomain quadrature.

pub mod bump;
pub mod domain;
pub mod field;
pub mod linalg;
pub mod ops;
pub mod poisson;
pub mod quadrature;
pub mod random;
pub mod shift;
pub mod spectral;

pub use domain::{BcKind, DomainSpec, Subdomain};
pub use field::{Components, ScalarField, VelocityField, VorticityField, DIV_TOL};
pub use ops::{curl, divergence};
pub use poisson::{poisson_solve_channel, stream_function, WallCondition};
pub use quadrature::{restrict, RegionWeights, RestrictedView};
pub use random::{Band, RandomSpectrum};
pub use shift::{shift_sample, ShiftedField};
