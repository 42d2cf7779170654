//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation. Sweeps continue
//! until the off-diagonal Frobenius mass falls below [`OFF_DIAGONAL_TOL`]
//! (scaled by the matrix norm when that exceeds one).

use super::matrix::{CMatrix, C64, ZERO};
use crate::{Error, Result};

/// Input must satisfy ‖M − M†‖_max ≤ this.
pub const HERMITIAN_TOL: f64 = 1e-8;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V · diag(values) · V†`, values descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// V·f(Λ)·V†
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.vectors[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, k)].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    // Symmetrize so rounding noise in the input does not leak into the sweeps.
    let mut a = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            a[(r, c)] = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
        }
    }
    let mut v = CMatrix::identity(n);
    let tol = OFF_DIAGONAL_TOL * m.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Unit phase that turns a_pq real and positive.
    let phase = apq / mag;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // J = D·R with D = diag(1, conj(phase)) on (p, q) and R the real rotation.
    let j_pp = C64::new(cs, 0.0);
    let j_pq = C64::new(sn, 0.0);
    let j_qp = phase.conj() * (-sn);
    let j_qq = phase.conj() * cs;

    let n = a.rows();
    // A ← A·J
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * j_pp + arq * j_qp;
        a[(r, q)] = arp * j_pq + arq * j_qq;
    }
    // A ← J†·A
    for c in 0..n {
        let apc = a[(p, c)];
        let aqc = a[(q, c)];
        a[(p, c)] = j_pp.conj() * apc + j_qp.conj() * aqc;
        a[(q, c)] = j_pq.conj() * apc + j_qq.conj() * aqc;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V·J
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * j_pp + vrq * j_qp;
        v[(r, q)] = vrp * j_pq + vrq * j_qq;
    }
}

/// Eigenvalues e^{iφ} of a unitary matrix, via a generic Hermitian
/// combination of its real and imaginary parts (which share eigenvectors).
pub fn unitary_eigenvalues(u: &CMatrix) -> Result<Vec<C64>> {
    let n = u.rows();
    let ud = u.adjoint();
    let mut h = CMatrix::zeros(n, n);
    // Irrational weight keeps accidental degeneracies away.
    let w = std::f64::consts::SQRT_2 * 0.731;
    for r in 0..n {
        for c in 0..n {
            let herm_re = (u[(r, c)] + ud[(r, c)]) * 0.5;
            let herm_im = (u[(r, c)] - ud[(r, c)]) * C64::new(0.0, -0.5);
            h[(r, c)] = herm_re + herm_im * w;
        }
    }
    let eig = eig_hermitian(&h)?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let vk = eig.vector(k);
        let uv = u.mul_vec(&vk)?;
        let lambda: C64 = vk.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
        out.push(lambda);
    }
    Ok(out)
}

/// Is `m` Hermitian positive semidefinite within `tol`?
pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    match eig_hermitian(m) {
        Ok(e) => e.values.iter().all(|&x| x >= -tol),
        Err(_) => false,
    }
}

/// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
pub fn spectral_projector(e: &HermitianEigen, keep: impl Fn(f64) -> bool) -> CMatrix {
    e.reconstruct_with(|x| if keep(x) { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{c, cr};
    use crate::qcore::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_z() {
        let z = CMatrix::diag(&[cr(1.0), cr(-1.0)]);
        let e = eig_hermitian(&z).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!((e.vectors[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((e.vectors[(1, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_gives_plus_minus() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eig_hermitian(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] + 1.0).abs() < 1e-12);
        let plus = e.vector(0);
        // |+⟩ up to phase
        let overlap = (plus[0] + plus[1]) * std::f64::consts::FRAC_1_SQRT_2;
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_pivot() {
        let y = CMatrix::from_rows(&[vec![cr(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), cr(0.0)]]);
        let e = eig_hermitian(&y).unwrap();
        let recon = e.reconstruct_with(|x| x);
        assert!(recon.max_abs_diff(&y) < 1e-12);
    }

    #[test]
    fn random_8x8_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_hermitian(8, &mut rng);
            let e = eig_hermitian(&m).unwrap();
            assert!(e.reconstruct_with(|x| x).max_abs_diff(&m) <= 1e-8);
            assert!(e.vectors.unitarity_defect() <= 1e-8);
            for k in 0..8 {
                let v = e.vector(k);
                let mv = m.mul_vec(&v).unwrap();
                for (a, b) in mv.iter().zip(&v) {
                    assert!((a - b * e.values[k]).norm() <= 1e-8);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn degenerate_spectrum() {
        let m = CMatrix::identity(4).scale_real(0.25);
        let e = eig_hermitian(&m).unwrap();
        assert!(e.values.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn unitary_phases() {
        let s = CMatrix::diag(&[cr(1.0), c(0.0, 1.0)]);
        let mut ev = unitary_eigenvalues(&s).unwrap();
        ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        assert!((ev[0] - cr(1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }
}
