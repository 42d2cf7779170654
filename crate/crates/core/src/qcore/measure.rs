//! Single-qubit projective measurements. The measured qubit is removed from
//! the register, so the post-measurement state has half the dimension.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{C64, ONE, ZERO};
use super::state::StateVector;
use crate::{Error, Result};

/// Branches below this probability cannot be selected.
pub const IMPOSSIBLE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
    /// Outcome 0 ↔ (|0⟩ + e^{iθ}|1⟩)/√2, outcome 1 ↔ (|0⟩ − e^{iθ}|1⟩)/√2.
    XyPlane(f64),
}

impl Basis {
    /// Basis vectors for outcome 0 and outcome 1.
    pub fn vectors(self) -> [[C64; 2]; 2] {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Basis::Z => [[ONE, ZERO], [ZERO, ONE]],
            Basis::X => [[r, r], [r, -r]],
            Basis::Y => [[r, C64::new(0.0, FRAC_1_SQRT_2)], [r, C64::new(0.0, -FRAC_1_SQRT_2)]],
            Basis::XyPlane(theta) => {
                let e = C64::from_polar(FRAC_1_SQRT_2, theta);
                [[r, e], [r, -e]]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub outcome: u8,
    pub probability: f64,
    /// `None` when the branch is impossible.
    pub state: Option<StateVector>,
}

/// Unnormalized ⟨b|_q |ψ⟩ with qubit `q` removed.
fn contract(state: &StateVector, qubit: usize, bra: &[C64; 2]) -> Vec<C64> {
    let n = state.n_qubits();
    let low_mask = (1usize << qubit) - 1;
    let amps = state.amplitudes();
    let half = 1usize << (n - 1);
    let (b0, b1) = (bra[0].conj(), bra[1].conj());
    (0..half)
        .map(|r| {
            let base = (r & low_mask) | ((r & !low_mask) << 1);
            b0 * amps[base] + b1 * amps[base | (1 << qubit)]
        })
        .collect()
}

fn check(state: &StateVector, qubit: usize) -> Result<()> {
    if qubit >= state.n_qubits() {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            n_qubits: state.n_qubits(),
        });
    }
    Ok(())
}

fn branch(state: &StateVector, qubit: usize, basis: Basis, outcome: u8) -> Branch {
    let vectors = basis.vectors();
    let amps = contract(state, qubit, &vectors[outcome as usize]);
    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let post = if p < IMPOSSIBLE_TOL {
        None
    } else {
        let mut s = StateVector::from_amplitudes_unchecked(state.n_qubits() - 1, amps);
        s.normalize();
        Some(s)
    };
    Branch {
        outcome,
        probability: p,
        state: post,
    }
}

/// Both outcome branches with their Born probabilities.
pub fn enumerate_outcomes(state: &StateVector, qubit: usize, basis: Basis) -> Result<[Branch; 2]> {
    check(state, qubit)?;
    Ok([branch(state, qubit, basis, 0), branch(state, qubit, basis, 1)])
}

/// Forces a specific outcome; fails if its probability is below 1e-14.
pub fn project_outcome(
    state: &StateVector,
    qubit: usize,
    basis: Basis,
    outcome: u8,
) -> Result<(f64, StateVector)> {
    check(state, qubit)?;
    let b = branch(state, qubit, basis, outcome & 1);
    match b.state {
        Some(s) => Ok((b.probability, s)),
        None => Err(Error::ImpossibleOutcome(b.probability)),
    }
}

/// Born-rule sample of a single-qubit measurement.
pub fn measure_single_qubit(
    state: &StateVector,
    qubit: usize,
    basis: Basis,
    rng: &mut impl Rng,
) -> Result<(u8, StateVector)> {
    check(state, qubit)?;
    let b0 = branch(state, qubit, basis, 0);
    let total = state.norm().powi(2);
    let u: f64 = rng.random::<f64>() * total;
    if u < b0.probability {
        if let Some(s) = b0.state {
            return Ok((0, s));
        }
    }
    let b1 = branch(state, qubit, basis, 1);
    match b1.state {
        Some(s) => Ok((1, s)),
        // only reachable through rounding when outcome 1 is (numerically) impossible
        None => b0.state.map(|s| (0, s)).ok_or(Error::ImpossibleOutcome(b1.probability)),
    }
}
