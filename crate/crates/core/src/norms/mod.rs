//! Local Besov, Sobolev and Hölder norms and second-order structure functions.

pub mod besov;
pub mod cutoff;
pub mod embedding;
pub mod report;
pub mod shiftset;
pub mod sobolev;
pub mod structure;

pub use besov::{besov_norm, besov_norm_spacetime, l2_on};
pub use cutoff::{Cutoff, HolderBound};
pub use embedding::{
    band_limited_ensemble, besov_norm_extended, verify_cutoff_inequality, verify_embedding_chain, CutoffCheck,
    EmbeddingContext, EmbeddingParams, EmbeddingRatios, EmbeddingReport, EmbeddingVerdict, CUTOFF_C_CAL,
};
pub use report::{NormDetail, NormKind, NormReport};
pub use sobolev::{box_sobolev_sq, sobolev_norm_cutoff, sobolev_norm_cutoff_spacetime, zero_extend};
pub use shiftset::{axis_directions, eight_directions, Shift, ShiftSet};
pub use structure::{
    increment_energy, region_weights_for, structure_function, trapezoid_in_time, IntegrationRegion,
    StructureFunctionTable,
};
