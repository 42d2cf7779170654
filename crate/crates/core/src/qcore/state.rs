use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;

/// Dense pure state of `n_qubits` qubits. Amplitude index bit `q` is the
/// computational value of qubit `q` (qubit 0 least significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

/// Scatter the low bits of `value` into the bit positions listed in
/// `positions` (bit i of `value` lands at `positions[i]`).
#[inline]
pub fn deposit_bits(value: usize, positions: &[usize]) -> usize {
    let mut out = 0;
    for (i, &p) in positions.iter().enumerate() {
        out |= ((value >> i) & 1) << p;
    }
    out
}

/// Inverse of [`deposit_bits`].
#[inline]
pub fn extract_bits(index: usize, positions: &[usize]) -> usize {
    let mut out = 0;
    for (i, &p) in positions.iter().enumerate() {
        out |= ((index >> p) & 1) << i;
    }
    out
}

/// Qubits in `0..n` not listed in `taken`, ascending.
pub fn complement(n: usize, taken: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !taken.contains(q)).collect()
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(1),
                found: len,
            });
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub(crate) fn from_amplitudes_unchecked(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// |0…0⟩
    pub fn zeros(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// |+⟩^{⊗n}
    pub fn plus(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n_qubits,
            amplitudes: vec![a; dim],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm; returns the norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
        n
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|², the fidelity between pure states.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Kronecker product `self ⊗ other`: `other` occupies the low qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    /// Appends a fresh qubit in `state` as the new highest-index qubit.
    pub fn push_qubit(&mut self, state: [C64; 2]) {
        let dim = self.dim();
        let mut amplitudes = Vec::with_capacity(2 * dim);
        for s in state {
            amplitudes.extend(self.amplitudes.iter().map(|a| a * s));
        }
        self.amplitudes = amplitudes;
        self.n_qubits += 1;
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_single(&mut self, q: usize, u: &[[C64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for i in 0..self.dim() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amplitudes[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::InvalidParameter("CZ on a single qubit".into()));
        }
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidParameter("CX on a single qubit".into()));
        }
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.dim() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// Applies a 2^k × 2^k matrix to the listed qubits; `qubits[i]` is the
    /// matrix's qubit i.
    pub fn apply_matrix(&mut self, qubits: &[usize], m: &CMatrix) -> Result<()> {
        let k = qubits.len();
        if m.rows() != 1 << k || m.cols() != 1 << k {
            return Err(Error::DimensionMismatch {
                expected: 1 << k,
                found: m.rows(),
            });
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let rest = complement(self.n_qubits, qubits);
        let sub = 1usize << k;
        let mut buf = vec![ZERO; sub];
        for r in 0..(1usize << rest.len()) {
            let base = deposit_bits(r, &rest);
            for (a, slot) in buf.iter_mut().enumerate() {
                *slot = self.amplitudes[base | deposit_bits(a, qubits)];
            }
            for a in 0..sub {
                let v: C64 = m.row(a).iter().zip(&buf).map(|(x, y)| x * y).sum();
                self.amplitudes[base | deposit_bits(a, qubits)] = v;
            }
        }
        Ok(())
    }

    /// Reorders qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: order.len(),
            });
        }
        let mut amplitudes = vec![ZERO; self.dim()];
        for (new_idx, slot) in amplitudes.iter_mut().enumerate() {
            *slot = self.amplitudes[deposit_bits(new_idx, order)];
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes,
        })
    }

    /// ⟨ψ|M|ψ⟩ for a full-register operator.
    pub fn expectation_matrix(&self, m: &CMatrix) -> Result<C64> {
        let mv = m.mul_vec(&self.amplitudes)?;
        Ok(self.inner(&Self::from_amplitudes_unchecked(self.n_qubits, mv)))
    }

    /// Overlap up to a global phase: |⟨a|b⟩| ≈ 1.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.n_qubits == other.n_qubits && (self.inner(other).norm() - 1.0).abs() <= tol
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }
}
