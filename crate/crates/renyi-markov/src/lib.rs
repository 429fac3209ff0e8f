//! Matrix-product toolkit for the second Rényi conditional mutual information
//! of decohered spin-1/2 chains.
//!
//! The pipeline: find a matrix-product ground state of a cluster or
//! transverse-field Ising chain with two-site DMRG, vectorize the pure-state
//! density matrix into a doubled-space (Choi) matrix-product state, push it
//! through local decoherence channels as matrix-product operators, and read
//! off second Rényi entropies of contiguous regions from doubled-space
//! overlaps with maximal-depolarizer projectors. Conditional mutual
//! information on an A|B|C|B ring partition, swept over the buffer width,
//! is fit to a decaying exponential whose rate is the inverse Markov length.
//!
//! Exact-diagonalization and stabilizer-formalism oracles cover every stage
//! at small sizes; all floating-point reductions run in a fixed order so
//! repeated runs are bit-identical.

extern crate blas_src;

pub mod choi;
pub mod dmrg;
pub mod fitter;
pub mod mps;
pub mod oracle;
pub mod renyi;
pub mod runner;
pub mod stabilizer;
pub mod tensor;

pub use choi::{identity_choi, vectorize_pure, ChannelKind, ChannelReport, ChannelSpec, ChoiError, ChoiState};
pub use dmrg::{
    ground_state, ground_state_seeded, DmrgConfig, DmrgError, GroundStateResult, Model, ModelSpec,
};
pub use fitter::{
    fit_exponential, fit_exponential_amplitude, fit_power_law, xi2_stability, CmiCurve, CmiPoint,
    CurveMeta, FitError, FitModel, FitResult,
};
pub use mps::{LogInner, MatrixProductOperator, MatrixProductState, MpsError};
pub use oracle::{
    ed_apply_channel, ed_cmi_renyi2, ed_cmi_von_neumann, ed_ground_state, ed_partial_trace,
    ed_second_renyi, ed_von_neumann, DenseDensityMatrix, DenseState, OracleError,
};
pub use renyi::{
    cmi, cmi_parts, cmi_r_sweep, renyi_mutual_information, second_renyi_entropy, CmiParts,
    CmiPipeline, RenyiError, Tripartition,
};
pub use runner::{
    fit_groups, p_x_of_p_zz, read_csv, run_cmi, run_fit, run_ground, run_oracle,
    run_stabilizer_check, run_sweep, sweep_points, write_csv, CheckpointMeta, CsvRow, Engine,
    GroundSummary, GroupFit, RunConfig, RunnerError, SweepAxis, SweepPoint, CSV_HEADER,
};
pub use stabilizer::{
    cluster_group, random_group, restricted_subgroup_dimension, stabilizer_cmi,
    stabilizer_renyi_entropy, swssb_group, PauliString, StabilizerError, StabilizerGroup,
};
pub use tensor::{contract, svd_split, DenseTensor, TensorError, TruncationPolicy};
