//! Simulation and verification toolkit for interactive distinguishability
//! protocols in which the verifier only performs single-qubit measurements.
//!
//! An (honest) prover prepares a graph state and hands most of it to the
//! verifier. The verifier either drives a measurement-based computation on it
//! or checks it with a randomized stabilizer test. The crate is organised
//! bottom-up:
//!
//! - [`qcore`]: dense states, density matrices, Pauli strings, channels,
//!   single-qubit measurements and the Hermitian eigensolver.
//! - [`graphstate`]: graphs, graph states, syndrome bases and a stabilizer
//!   tableau.
//! - [`stabtest`]: the region decomposition and the stabilizer test with its
//!   closeness bound.
//! - [`mbqc`]: a compiler from small gate circuits to measurement patterns and
//!   an adaptive executor that tracks byproduct operators.
//! - [`distinguish`]: trace distance, Helstrom measurement, diamond distance
//!   and the closed-form acceptance bounds of both protocols.
//! - [`protocols`]: the two protocols as executable state machines with a
//!   capability-restricted verifier and a Monte Carlo harness.
//!
//! Qubit ordering is little-endian everywhere: qubit 0 is the least
//! significant bit of a basis-state index.

pub mod distinguish;
pub mod error;
pub mod graphstate;
pub mod mbqc;
pub mod protocols;
pub mod qcore;
pub mod stabtest;

pub use error::{Error, Result};
