//! Experiment drivers. Each returns an [`ExperimentReport`] whose checks carry
//! the provenance of their reference values.

mod bupu_check;
mod chirp;
mod corpus;
mod dispersive;
mod fit;
mod holder;
mod potential;
mod report;
mod strichartz;
mod tail;

pub use bupu_check::{bupu_check_experiment, partition_defect, BupuParams};
pub use chirp::{check_chirp_resolution, chirp_norm_closed_form, chirp_spec, verify_chirp_norm, ChirpNormParams, GridParams};
pub use corpus::{band_limited, gaussian_corpus, lorentz_corpus, random_band_limited, Sample};
pub use dispersive::{
    dispersive_experiment, fixed_time_amalgam_experiment, fixed_time_spec, DispersiveParams, EvolvedData, FixedTimeParams,
};
pub use fit::{fit_decay, log_spaced, AdmissiblePair, DecayFit};
pub use holder::{
    holder_duality_experiment, pointwise_embedding_experiment, pointwise_ratio, space_time_norm, EmbeddingParams,
    HolderParams, SpaceTime,
};
pub use potential::{potential_experiment, strang_order, trajectory_strichartz_norm, PotentialKind, PotentialParams};
pub use report::{Check, Comparison, ExperimentReport, Observation, Provenance};
pub use strichartz::{
    strichartz_ratio_experiment, strichartz_run, strichartz_space_spec, tail_fraction, StrichartzParams, StrichartzRun,
};
pub use tail::{phi_alpha_tail_experiment, tail_local_norm, TailParams};
