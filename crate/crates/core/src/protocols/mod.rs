//! The two interactive protocols: the prover prepares a graph state, the
//! verifier either drives a measurement pattern on it or runs the stabilizer
//! test, using single-qubit measurements only.

pub mod estimate;
pub mod layout;
pub mod run;
pub mod setup;
pub mod strategy;
pub mod world;

pub use estimate::{
    estimate_acceptance, run_trials, setup_for_instance, summarize, AcceptanceEstimate, Overrides, QChoice,
    DEFAULT_EPSILON,
};
pub use layout::{Protocol, ProtocolGraph};
pub use run::{enumerate_compute_branches, run_qcd, run_qsd, run_trial, DeliveredBranch, ProtocolTranscript, RunBranch};
pub use setup::ProtocolSetup;
pub use strategy::{strategy_by_name, strategy_library, ProverStrategy, VerifierReport, STRATEGY_NAMES};
pub use world::{verifier_capability_guard, Action, Party, ProverDevice, VerifierDevice, World};
