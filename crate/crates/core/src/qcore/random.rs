//! Random states and operators for sampling-based tests and adversaries.

use rand::Rng;
use rand_distr::StandardNormal;

use super::density::DensityMatrix;
use super::matrix::{CMatrix, C64};
use super::povm::{inverse_sqrt, Povm};
use super::state::StateVector;

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on `n` qubits.
pub fn haar_state(n: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    let mut s = StateVector::from_amplitudes_unchecked(n, amps);
    s.normalize();
    s
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    CMatrix::from_vec(rows, cols, data).expect("shape")
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    let mut u = CMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random full-rank (almost surely) density matrix G·G†/Tr.
pub fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = 1usize << n;
    let g = ginibre(d, d, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(n, m.scale_real(1.0 / tr))
}

/// Random density matrix of the given rank (mixture of `rank` Haar states).
pub fn random_density_of_rank(n: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = 1usize << n;
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(n, m.scale_real(1.0 / tr))
}

/// Random `outcomes`-element POVM on dimension `dim`: E_i = S^{−1/2} G_i S^{−1/2}
/// with G_i = A_i A_i† and S = Σ G_i.
pub fn random_povm(dim: usize, outcomes: usize, rng: &mut impl Rng) -> Povm {
    let gs: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let a = ginibre(dim, dim, rng);
            &a * &a.adjoint()
        })
        .collect();
    let mut s = CMatrix::zeros(dim, dim);
    for g in &gs {
        s = &s + g;
    }
    let w = inverse_sqrt(&s).expect("sum of Ginibre Gram matrices is positive definite");
    let elements = gs
        .iter()
        .map(|g| {
            let e = &(&w * g) * &w;
            (&e + &e.adjoint()).scale_real(0.5)
        })
        .collect();
    Povm::new(elements).expect("normalized POVM")
}
