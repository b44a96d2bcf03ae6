//! Exponent fitting, inertial-range and equivalence verdicts, weak-form residuals and the
//! vanishing-viscosity sweep.

pub mod anomaly;
pub mod diagnose;
pub mod equivalence;
pub mod fit;
pub mod sweep;
pub mod testfields;

pub use anomaly::{average_series, dissipation_anomaly, limit_besov_check, AnomalyEstimate, LimitBesovCheck, Trend};
pub use diagnose::{diagnose, Constants, DiagnoseParams, Diagnosis};
pub use equivalence::{default_delta, equivalence_report, uniformity_verdict, EquivalenceReport, NestedRegions, UniformityVerdict};
pub use fit::{
    check_inertial_condition, dissipation_scale, fit_zeta2, fit_zeta2_pairs, sub_dissipation_check,
    InertialThresholds, InertialVerdict, SubDissipationVerdict, Verdict, ZetaFit,
};
pub use sweep::{run_sweep, NuRecord, Section, SweepArtifacts, SweepConfig, SweepReport, INSUFFICIENT};
pub use testfields::{euler_residual, weak_pairing, PairingMatrix, Residuals, TestField, TestFieldBank};
