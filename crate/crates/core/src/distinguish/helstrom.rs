//! Trace distance and the optimal two-outcome measurement.

use crate::qcore::eigen::spectral_projector;
use crate::qcore::{eig_hermitian, trace_norm, CMatrix, DensityMatrix, Povm};
use crate::{Error, Result};

fn difference(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<CMatrix> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: rho1.dim(),
        });
    }
    Ok(rho0.matrix() + &rho1.matrix().scale_real(-1.0))
}

/// ½‖ρ₀ − ρ₁‖₁
pub fn trace_distance(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    let d = trace_norm(&difference(rho0, rho1)?)?;
    Ok((0.5 * d).clamp(0.0, 1.0))
}

/// Π₀ projects onto the nonnegative eigenspace of ρ₀ − ρ₁, Π₁ = I − Π₀.
pub fn helstrom_povm(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<Povm> {
    let diff = difference(rho0, rho1)?;
    let eig = eig_hermitian(&diff)?;
    let pi0 = spectral_projector(&eig, |l| l >= 0.0);
    let pi1 = &CMatrix::identity(diff.rows()) + &pi0.scale_real(-1.0);
    Povm::new(vec![pi0, pi1])
}

/// ½ + ¼‖ρ₀ − ρ₁‖₁, the optimal success probability with equal priors.
pub fn helstrom_success(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    Ok(0.5 + 0.5 * trace_distance(rho0, rho1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{random_density, random_povm};
    use crate::qcore::StateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure(v: &[f64]) -> DensityMatrix {
        let amps = v.iter().map(|&x| crate::qcore::matrix::cr(x)).collect();
        DensityMatrix::from_pure(&StateVector::from_amplitudes(amps).unwrap())
    }

    #[test]
    fn trace_distance_examples() {
        let zero = pure(&[1.0, 0.0]);
        let one = pure(&[0.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure(&[h, h]);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        // Pure-state formula √(1 − |⟨φ|ψ⟩|²).
        let expected = (1.0f64 - 0.5).sqrt();
        assert!((trace_distance(&zero, &plus).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn helstrom_examples() {
        let zero = pure(&[1.0, 0.0]);
        let one = pure(&[0.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure(&[h, h]);
        let p = helstrom_povm(&zero, &one).unwrap();
        assert!((p.success_probability(&zero, &one).unwrap() - 1.0).abs() < 1e-10);
        let p = helstrom_povm(&zero, &zero).unwrap();
        assert!((p.success_probability(&zero, &zero).unwrap() - 0.5).abs() < 1e-10);
        let p = helstrom_povm(&zero, &plus).unwrap();
        let expected = 0.5 + 0.5 * h;
        assert!((p.success_probability(&zero, &plus).unwrap() - expected).abs() < 1e-10);
        assert!((helstrom_success(&zero, &plus).unwrap() - 0.853_553_390_593_273_8).abs() < 1e-10);
    }

    #[test]
    fn helstrom_attains_closed_form_and_dominates_random_povms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for _ in 0..10 {
                let r0 = random_density(n, &mut rng);
                let r1 = random_density(n, &mut rng);
                let best = helstrom_success(&r0, &r1).unwrap();
                let attained = helstrom_povm(&r0, &r1)
                    .unwrap()
                    .success_probability(&r0, &r1)
                    .unwrap();
                assert!((best - attained).abs() < 1e-9);
                let other = random_povm(1 << n, 2, &mut rng);
                assert!(other.success_probability(&r0, &r1).unwrap() <= best + 1e-9);
            }
        }
    }

    #[test]
    fn mismatched_dimensions_error() {
        let a = DensityMatrix::maximally_mixed(1);
        let b = DensityMatrix::maximally_mixed(2);
        assert!(trace_distance(&a, &b).is_err());
    }
}
