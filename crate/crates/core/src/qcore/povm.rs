use super::density::DensityMatrix;
use super::eigen::{eig_hermitian, is_psd};
use super::matrix::CMatrix;
use crate::{Error, Result};

pub const PSD_TOL: f64 = 1e-10;
pub const SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Validated: every element PSD within 1e-10, elements sum to I within 1e-9.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = match elements.first() {
            Some(e) => e.rows(),
            None => return Err(Error::InvalidParameter("empty POVM".into())),
        };
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &elements {
            if e.rows() != dim || !e.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.rows(),
                });
            }
            if e.hermiticity_defect() > PSD_TOL {
                return Err(Error::NotHermitian(e.hermiticity_defect()));
            }
            if !is_psd(e, PSD_TOL) {
                return Err(Error::InvalidParameter("POVM element is not PSD".into()));
            }
            sum = &sum + e;
        }
        let defect = sum.max_abs_diff(&CMatrix::identity(dim));
        if defect > SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "POVM elements do not sum to identity (defect {defect:e})"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Tr(E_i ρ)
    pub fn probability(&self, i: usize, rho: &DensityMatrix) -> f64 {
        self.elements[i].trace_product(rho.matrix()).re
    }

    /// ½Tr(Π₀ρ₀) + ½Tr(Π₁ρ₁) for a two-outcome POVM.
    pub fn success_probability(&self, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
        if self.elements.len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "two-outcome POVM required, got {}",
                self.elements.len()
            )));
        }
        if rho0.dim() != self.dim() || rho1.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho0.dim(),
            });
        }
        Ok(0.5 * self.probability(0, rho0) + 0.5 * self.probability(1, rho1))
    }
}

/// S^{−1/2} for a positive definite S.
pub(crate) fn inverse_sqrt(s: &CMatrix) -> Result<CMatrix> {
    let e = eig_hermitian(s)?;
    if e.values.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidParameter("matrix is not positive definite".into()));
    }
    Ok(e.reconstruct_with(|v| 1.0 / v.sqrt()))
}
