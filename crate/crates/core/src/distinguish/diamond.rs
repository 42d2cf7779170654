//! Diamond-norm distance between channels by see-saw ascent.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::qcore::channel::{apply_adjoint_low, apply_low_block};
use crate::qcore::eigen::unitary_eigenvalues;
use crate::qcore::random::haar_state;
use crate::qcore::{eig_hermitian, trace_norm, CMatrix, Channel, DensityMatrix, StateVector};
use crate::{Error, Result};

pub const STAGNATION_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 500;

/// See-saw estimate of ‖Q₀ − Q₁‖⋄. `value` is attained by `witness`, a pure
/// state with the channel input on its low qubits and an equally sized
/// ancilla on the high qubits. `oracle` holds the exact value when both
/// channels are unitary.
#[derive(Clone, Debug, Serialize)]
pub struct DiamondEstimate {
    pub value: f64,
    #[serde(skip)]
    pub witness: StateVector,
    pub oracle: Option<f64>,
    pub iterations: usize,
}

fn check_pair(q0: &Channel, q1: &Channel) -> Result<()> {
    if q0.n_in() != q1.n_in() {
        return Err(Error::DimensionMismatch {
            expected: q0.n_in(),
            found: q1.n_in(),
        });
    }
    if q0.n_out() != q1.n_out() {
        return Err(Error::DimensionMismatch {
            expected: q0.n_out(),
            found: q1.n_out(),
        });
    }
    Ok(())
}

/// (Q₀ − Q₁ ⊗ I)(|ψ⟩⟨ψ|)
pub fn output_difference(q0: &Channel, q1: &Channel, psi: &StateVector) -> Result<CMatrix> {
    let rho = DensityMatrix::from_pure(psi);
    let a = apply_low_block(q0, rho.matrix())?;
    let b = apply_low_block(q1, rho.matrix())?;
    Ok(&a + &b.scale_real(-1.0))
}

/// ‖(Q₀ − Q₁ ⊗ I)(|ψ⟩⟨ψ|)‖₁ for a given input state.
pub fn distinguishability(q0: &Channel, q1: &Channel, psi: &StateVector) -> Result<f64> {
    check_pair(q0, q1)?;
    trace_norm(&output_difference(q0, q1, psi)?)
}

fn ascend(q0: &Channel, q1: &Channel, mut psi: StateVector) -> Result<(f64, StateVector, usize)> {
    let n = psi.n_qubits();
    let mut best = f64::NEG_INFINITY;
    let mut best_psi = psi.clone();
    for it in 1..=MAX_ITERATIONS {
        let diff = output_difference(q0, q1, &psi)?;
        let eig = eig_hermitian(&diff)?;
        let value: f64 = eig.values.iter().map(|l| l.abs()).sum();
        if value > best {
            best_psi = psi.clone();
        }
        if value <= best + STAGNATION_TOL {
            return Ok((best.max(value), best_psi, it));
        }
        best = value;
        let sign = eig.reconstruct_with(|l| if l >= 0.0 { 1.0 } else { -1.0 });
        let a = apply_adjoint_low(q0, &sign)?;
        let b = apply_adjoint_low(q1, &sign)?;
        let top = eig_hermitian(&(&a + &b.scale_real(-1.0)))?;
        psi = StateVector::from_amplitudes(top.vector(0))
            .map_err(|_| Error::InvalidParameter("degenerate see-saw step".into()))?;
        debug_assert_eq!(psi.n_qubits(), n);
    }
    Ok((best, best_psi, MAX_ITERATIONS))
}

/// Lower-bound estimate of ‖Q₀ − Q₁‖⋄ from the best of `restarts` see-saw
/// runs started at Haar-random inputs. Restarts run in parallel, each with
/// its own seed drawn from `rng`.
pub fn diamond_distance(
    q0: &Channel,
    q1: &Channel,
    restarts: usize,
    rng: &mut dyn RngCore,
) -> Result<DiamondEstimate> {
    check_pair(q0, q1)?;
    let n = q0.n_in();
    let needed = n + n.max(q0.n_out());
    if needed > crate::qcore::DENSE_QUBIT_LIMIT {
        return Err(Error::DenseBudgetExceeded {
            needed,
            limit: crate::qcore::DENSE_QUBIT_LIMIT,
        });
    }
    let oracle = unitary_diamond_distance(q0, q1)?;
    if n == 0 {
        let witness = StateVector::basis(0, 0);
        let value = distinguishability(q0, q1, &witness)?;
        return Ok(DiamondEstimate {
            value,
            witness,
            oracle,
            iterations: 0,
        });
    }
    let seeds: Vec<u64> = (0..restarts.max(1)).map(|_| rng.random()).collect();
    let runs = seeds
        .into_par_iter()
        .map(|seed| {
            let mut local = ChaCha8Rng::seed_from_u64(seed);
            ascend(q0, q1, haar_state(2 * n, &mut local))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = None::<(f64, StateVector, usize)>;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.0 > b.0) {
            best = Some(run);
        }
    }
    let (value, witness, iterations) = best.expect("at least one restart");
    Ok(DiamondEstimate {
        value,
        witness,
        oracle,
        iterations,
    })
}

/// Exact ‖U − V‖⋄ for unitary channels: with ν the distance from the origin
/// to the convex hull of the eigenvalues of U†V, the value is 2√(1 − ν²).
/// Returns `None` unless both channels are unitary.
pub fn unitary_diamond_distance(q0: &Channel, q1: &Channel) -> Result<Option<f64>> {
    let (Some(u), Some(v)) = (q0.as_unitary(), q1.as_unitary()) else {
        return Ok(None);
    };
    if u.rows() != v.rows() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: v.rows(),
        });
    }
    let w = &u.adjoint() * v;
    let mut phases: Vec<f64> = unitary_eigenvalues(&w)?
        .iter()
        .map(|z| z.arg())
        .collect();
    phases.sort_by(f64::total_cmp);
    let tau = std::f64::consts::TAU;
    let mut largest_gap = phases[0] + tau - phases[phases.len() - 1];
    for pair in phases.windows(2) {
        largest_gap = largest_gap.max(pair[1] - pair[0]);
    }
    let span = tau - largest_gap;
    if span >= std::f64::consts::PI {
        Ok(Some(2.0))
    } else {
        Ok(Some(2.0 * (span / 2.0).sin()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates::Gate;
    use crate::qcore::random::random_unitary;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    fn unitary(gates: Vec<Gate>) -> Channel {
        Channel::from_gates(1, 1, gates).unwrap()
    }

    #[test]
    fn equal_channels_have_zero_distance() {
        let q = unitary(vec![Gate::H(0)]);
        let est = diamond_distance(&q, &q, 3, &mut rng()).unwrap();
        assert!(est.value.abs() < 1e-9);
        assert!(est.oracle.unwrap().abs() < 1e-9);
    }

    #[test]
    fn identity_versus_x_is_two() {
        let est = diamond_distance(&Channel::identity(1), &unitary(vec![Gate::X(0)]), 5, &mut rng())
            .unwrap();
        assert!((est.value - 2.0).abs() < 1e-6);
        assert_eq!(est.oracle, Some(2.0));
        let check = distinguishability(&Channel::identity(1), &unitary(vec![Gate::X(0)]), &est.witness)
            .unwrap();
        assert!((check - est.value).abs() < 1e-9);
    }

    #[test]
    fn identity_versus_phase_gate() {
        // Eigenvalues 1 and i: ν = cos(π/4), value 2√(1 − ν²) = √2.
        let nu = (std::f64::consts::FRAC_PI_4).cos();
        let expected = 2.0 * (1.0 - nu * nu).sqrt();
        let q1 = unitary(vec![Gate::S(0)]);
        let est = diamond_distance(&Channel::identity(1), &q1, 10, &mut rng()).unwrap();
        assert!((est.oracle.unwrap() - expected).abs() < 1e-9);
        assert!((est.value - expected).abs() < 1e-6);
    }

    #[test]
    fn see_saw_tracks_oracle_on_random_unitaries() {
        let mut r = rng();
        for _ in 0..10 {
            let u = Channel::from_unitary(1, random_unitary(2, &mut r)).unwrap();
            let v = Channel::from_unitary(1, random_unitary(2, &mut r)).unwrap();
            let est = diamond_distance(&u, &v, 20, &mut r).unwrap();
            let exact = est.oracle.unwrap();
            assert!(est.value <= exact + 1e-6);
            assert!(est.value >= exact - 1e-4);
        }
    }

    #[test]
    fn ancilla_never_hurts() {
        // Amplitude damping vs identity: product inputs give a lower bound.
        let g = 0.6f64;
        let k0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]]);
        let k1 = CMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]);
        let damp = Channel::new(1, 1, vec![k0, k1]).unwrap();
        let id = Channel::identity(1);
        let mut r = rng();
        let est = diamond_distance(&damp, &id, 10, &mut r).unwrap();
        assert!(est.oracle.is_none());
        for _ in 0..50 {
            let phi = haar_state(1, &mut r);
            let product = StateVector::basis(1, 0).tensor(&phi);
            let v = distinguishability(&damp, &id, &product).unwrap();
            assert!(est.value >= v - 1e-9);
        }
    }

    #[test]
    fn mismatched_inputs_error() {
        let mut r = rng();
        assert!(diamond_distance(&Channel::identity(1), &Channel::identity(2), 1, &mut r).is_err());
    }
}
