//! Measurement-based computation: circuits, the pattern compiler and an
//! adaptive executor that tracks byproduct operators.

pub mod circuit;
pub mod execute;
pub mod pattern;

pub use circuit::{random_circuit, Circuit, Op, WireInput};
pub use execute::{
    apply_byproduct, correct_byproduct, execute, execute_all_branches,
    execute_all_branches_with_input, execute_with_input, BranchResult, Execution,
};
pub use pattern::{compile, compile_ops, compile_pair, ByproductRecord, Measurement, MeasurementPattern};
