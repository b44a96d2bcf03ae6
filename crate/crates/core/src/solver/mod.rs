//! Time integration of the channel Navier–Stokes equations with an energy ledger.

pub mod forcing;
pub mod initial;
pub mod ledger;
pub mod oracle;
pub mod projection;
pub mod run;
pub mod stepper;

pub use forcing::{ForcingKind, ForcingSpec};
pub use initial::{make_initial, InitSpec};
pub use ledger::EnergyLedger;
pub use projection::{project, Projector};
pub use run::{run, run_from, RunConfig, RunOutput};
pub use stepper::{AdvectionForm, Stepper, StepperConfig};
