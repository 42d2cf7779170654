//! Closed-form acceptance probabilities of both protocols.
//!
//! With probability `q` the verifier runs the computation and otherwise the
//! stabilizer test. For a YES instance the honest prover is accepted with
//! probability at least `alpha`. For a NO instance any prover is accepted
//! with probability at most `beta1` (if its state is far from the ideal
//! graph state, so the test catches it) or `beta2` (if it is close, so the
//! computation is faithful). `q_star` equalises the two gaps.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Acceptance quantities at a chosen `q`, together with the optimal `q_star`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub q: f64,
    pub q_star: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Lower bound on the gap obtained from the relaxed inequality chain.
    pub guaranteed_gap: f64,
}

impl BoundReport {
    /// max(β₁, β₂)
    pub fn beta(&self) -> f64 {
        self.beta1.max(self.beta2)
    }

    /// min(Δ₁, Δ₂)
    pub fn gap(&self) -> f64 {
        self.delta1.min(self.delta2)
    }
}

/// √(4ε − 4ε²), the distance allowed by a test passing with probability 1 − ε.
fn closeness(eps: f64) -> f64 {
    (4.0 * eps - 4.0 * eps * eps).sqrt()
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1/4), got {eps}"
        )));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q must lie in [0, 1], got {q}")));
    }
    Ok(())
}

fn check_q_star(q_star: f64, denominator: f64) -> Result<f64> {
    if denominator <= 0.0 || q_star > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "no admissible optimal q for these parameters (denominator {denominator:e})"
        )));
    }
    Ok(q_star)
}

fn beta1(eps: f64, q: f64) -> f64 {
    q + (1.0 - q) * (1.0 - eps)
}

/// q* for state distinguishability.
pub fn qsd_q_star(eps: f64, r: u32) -> Result<f64> {
    check_epsilon(eps)?;
    check_r(r)?;
    let denominator = eps + 0.5 - 2f64.powi(-(r as i32)) - closeness(eps);
    check_q_star(eps / denominator, denominator)
}

fn check_r(r: u32) -> Result<()> {
    if r < 3 {
        return Err(Error::InvalidParameter(format!("r must be at least 3, got {r}")));
    }
    Ok(())
}

/// State distinguishability bounds evaluated at `q = q*`.
pub fn qsd_bounds(eps: f64, r: u32) -> Result<BoundReport> {
    let q_star = qsd_q_star(eps, r)?;
    qsd_bounds_at(eps, r, q_star)
}

/// State distinguishability bounds evaluated at an arbitrary `q`.
pub fn qsd_bounds_at(eps: f64, r: u32, q: f64) -> Result<BoundReport> {
    check_epsilon(eps)?;
    check_r(r)?;
    check_q(q)?;
    let q_star = qsd_q_star(eps, r)?;
    let two_r = 2f64.powi(-(r as i32));
    let alpha = q * (1.0 - two_r) + (1.0 - q);
    let beta1 = beta1(eps, q);
    let beta2 = q * (0.5 + two_r + closeness(eps)) + (1.0 - q);
    let guaranteed_gap = eps * (0.5 - 0.25 - 2.0 * eps.sqrt()) / (eps + 0.5);
    Ok(BoundReport {
        epsilon: eps,
        q,
        q_star,
        alpha,
        beta1,
        beta2,
        delta1: alpha - beta1,
        delta2: alpha - beta2,
        guaranteed_gap,
    })
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&a) || !(0.0..=2.0).contains(&b) || b > a {
        return Err(Error::InvalidParameter(format!(
            "thresholds must satisfy 0 <= b <= a <= 2, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// q* for channel distinguishability.
pub fn qcd_q_star(eps: f64, a: f64, b: f64) -> Result<f64> {
    check_epsilon(eps)?;
    check_ab(a, b)?;
    let denominator = 0.5 + eps - closeness(eps) - b / 4.0;
    check_q_star(eps / denominator, denominator)
}

/// Channel distinguishability bounds evaluated at `q = q*`.
pub fn qcd_bounds(eps: f64, a: f64, b: f64) -> Result<BoundReport> {
    let q_star = qcd_q_star(eps, a, b)?;
    qcd_bounds_at(eps, a, b, q_star)
}

/// Channel distinguishability bounds evaluated at an arbitrary `q`.
pub fn qcd_bounds_at(eps: f64, a: f64, b: f64, q: f64) -> Result<BoundReport> {
    check_q(q)?;
    let q_star = qcd_q_star(eps, a, b)?;
    let alpha = q * (0.5 + a / 4.0) + (1.0 - q);
    let beta1 = beta1(eps, q);
    let beta2 = q * (0.5 + b / 4.0 + closeness(eps)) + (1.0 - q);
    let guaranteed_gap = eps * ((a - b) / 4.0 - 2.0 * eps.sqrt()) / (0.5 + eps);
    Ok(BoundReport {
        epsilon: eps,
        q,
        q_star,
        alpha,
        beta1,
        beta2,
        delta1: alpha - beta1,
        delta2: alpha - beta2,
        guaranteed_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qsd_paper_point() {
        let r = qsd_bounds(0.01, 3).unwrap();
        assert!((r.guaranteed_gap - 1.0 / 1020.0).abs() < 1e-12);
        // Denominator 0.01 + 0.5 − 0.125 − √0.0396.
        let denom = 0.385 - 0.0396f64.sqrt();
        assert!((denom - 0.186003).abs() < 1e-6);
        assert!((r.q_star - 0.01 / denom).abs() < 1e-12);
        assert!((r.q_star - 0.053762).abs() < 1e-6);
        assert!((r.delta1 - r.delta2).abs() < 1e-12);
        assert!(r.delta2 >= r.guaranteed_gap);
        for rr in 3..10 {
            let g = qsd_bounds(0.01, rr).unwrap().guaranteed_gap;
            assert!((g - 1.0 / 1020.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qcd_paper_point() {
        let r = qcd_bounds(0.01, 1.5, 0.5).unwrap();
        assert!((r.guaranteed_gap - 1.0 / 1020.0).abs() < 1e-12);
        let denom = 0.51 - 0.0396f64.sqrt() - 0.125;
        let expected = 0.01 * (0.25 - 0.0396f64.sqrt()) / denom;
        assert!((r.delta2 - expected).abs() < 1e-12);
        assert!((r.delta2 - 2.742e-3).abs() < 1e-6);
        assert!((r.delta1 - r.delta2).abs() < 1e-12);
    }

    #[test]
    fn equal_thresholds_leave_no_gap() {
        let r = qcd_bounds(0.01, 1.0, 1.0).unwrap();
        assert!(r.delta2 < 0.0);
    }

    #[test]
    fn small_epsilon_limit() {
        let r = qsd_bounds(1e-9, 4).unwrap();
        assert!(r.q_star < 1e-7);
        assert!(r.delta1.abs() < 1e-7 && r.delta2.abs() < 1e-7);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(qsd_bounds(0.0, 3).is_err());
        assert!(qsd_bounds(0.25, 3).is_err());
        assert!(qsd_bounds(0.01, 2).is_err());
        assert!(qcd_bounds(0.01, 0.5, 1.5).is_err());
        assert!(qcd_bounds(-0.1, 1.5, 0.5).is_err());
        // Admissible ε, but the optimal q falls outside [0, 1].
        assert!(qsd_bounds(0.1, 3).is_err());
    }

    proptest! {
        #[test]
        fn q_star_balances_gaps(eps in 1e-6f64..0.02, r in 3u32..12) {
            let rep = qsd_bounds(eps, r).unwrap();
            prop_assert!((rep.delta1 - rep.delta2).abs() < 1e-12);
            prop_assert!((rep.delta1 - (rep.alpha - rep.beta1)).abs() < 1e-15);
        }

        #[test]
        fn qcd_q_star_balances_gaps(eps in 1e-6f64..0.01, b in 0.0f64..0.8, extra in 0.0f64..1.0) {
            let rep = qcd_bounds(eps, b + extra, b).unwrap();
            prop_assert!((rep.delta1 - rep.delta2).abs() < 1e-12);
        }
    }
}
