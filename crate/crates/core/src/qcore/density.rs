use serde::{Deserialize, Serialize};

use super::eigen::eig_hermitian;
use super::matrix::{CMatrix, C64, ZERO};
use super::state::{complement, deposit_bits, StateVector};
use crate::{Error, Result};

pub const DENSITY_TOL: f64 = 1e-10;

/// Mixed state on `n_qubits` qubits, same index convention as
/// [`StateVector`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validated construction: Hermitian, unit trace and PSD within 1e-10.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                found: matrix.cols(),
            });
        }
        let rho = Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: CMatrix) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self {
            n_qubits: psi.n_qubits(),
            matrix: CMatrix::outer(a, a),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_defect();
        if herm > DENSITY_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidParameter(format!("density trace {tr}")));
        }
        let eig = eig_hermitian(&self.matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < -DENSITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "density matrix has eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// `self ⊗ other`, with `other` on the low qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Reduced state of a pure state on `keep`, with result qubit `i` equal to
    /// `keep[i]`. Avoids forming the full density matrix.
    pub fn reduced_from_pure(psi: &StateVector, keep: &[usize]) -> Result<Self> {
        let n = psi.n_qubits();
        let mut seen = vec![false; n];
        for &q in keep {
            if q >= n || seen[q] {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: n,
                });
            }
            seen[q] = true;
        }
        let rest = complement(n, keep);
        let dk = 1usize << keep.len();
        let dr = 1usize << rest.len();
        let amps = psi.amplitudes();
        let kept: Vec<usize> = (0..dk).map(|i| deposit_bits(i, keep)).collect();
        let mut matrix = CMatrix::zeros(dk, dk);
        for r in 0..dr {
            let base = deposit_bits(r, &rest);
            for i in 0..dk {
                let a = amps[base | kept[i]];
                if a == ZERO {
                    continue;
                }
                for j in 0..dk {
                    matrix[(i, j)] += a * amps[base | kept[j]].conj();
                }
            }
        }
        Ok(Self {
            n_qubits: keep.len(),
            matrix,
        })
    }

    /// Reduced state on `keep`. The result's qubit `i` is `keep[i]` after
    /// sorting ascending; an empty `keep` yields the 1×1 trace.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&q) = keep.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: keep.len(),
            matrix: partial_trace_matrix(&self.matrix, self.n_qubits, &keep),
        })
    }

    /// Reorders qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: order.len(),
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: permute_matrix(&self.matrix, order),
        })
    }

    /// Tr(ρ·M)
    pub fn expectation(&self, m: &CMatrix) -> C64 {
        self.matrix.trace_product(m)
    }

    /// Conjugate by a Pauli-type unitary given as a full-register matrix.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }
}

/// Reduced operator on the qubits `keep` (ascending) of an `n`-qubit operator.
pub fn partial_trace_matrix(m: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let traced = complement(n, keep);
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        let ia = deposit_bits(a, keep);
        for b in 0..dk {
            let ib = deposit_bits(b, keep);
            let mut acc = ZERO;
            for t in 0..dt {
                let it = deposit_bits(t, &traced);
                acc += m[(ia | it, ib | it)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

pub fn permute_matrix(m: &CMatrix, order: &[usize]) -> CMatrix {
    let dim = m.rows();
    let map: Vec<usize> = (0..dim).map(|i| deposit_bits(i, order)).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = m[(map[r], map[c])];
        }
    }
    out
}

/// ‖M‖₁ = Tr√(M†M): Σ|λ| for Hermitian input, singular values otherwise.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let scale = m.max_abs().max(1.0);
    if m.hermiticity_defect() <= 1e-12 * scale {
        let e = eig_hermitian(m)?;
        return Ok(e.values.iter().map(|x| x.abs()).sum());
    }
    let gram = &m.adjoint() * m;
    let e = eig_hermitian(&gram)?;
    Ok(e.values.iter().map(|&x| x.max(0.0).sqrt()).sum())
}
