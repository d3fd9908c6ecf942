//! Entanglement-assisted transmission of one classical bit through a noisy
//! two-bit-in, trit-and-bit-out classical channel.
//!
//! The crate evaluates the protocol exactly from Born-rule expectations,
//! simulates it with seeded Monte Carlo, optimizes it (closed form, simplex
//! search and lattice scan) and checks the qudit reductions and bounds.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod protocol;
pub mod qudit;
pub mod random;
pub mod verify;

pub use channel::{output_distribution, sample_output, ChannelInput, ChannelOutput, ChannelSpec, OutputTag};
pub use error::{Error, Result};
pub use linalg::{
    apply_local, born_expectation, conjugate_unitary, gram_schmidt_extend, post_measurement, ComplexScalar, Direction,
    LocalUnitary, Side, TwoQuditState,
};
pub use optimizer::{
    analytic_optimum, f_max, grid_oracle, numeric_optimize, objective_reduced, Method, OptimumResult, QubitParams,
    SharedMode,
};
pub use protocol::{
    alice_encode, bob_decode, classical_baseline, enhancement_f, run_protocol, success_exact, trial_records,
    ClassicalMode, Directions, InputMode, RunReport, Strategy, TrialRecord,
};
pub use qudit::{
    achieve_fully_entangled_bound, fully_entangled_bound, truncate, verify_truncation_inequality,
    verify_unitary_freedom, TruncationResult,
};
