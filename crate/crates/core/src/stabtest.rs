//! Randomized stabilizer test on a subregion V₁ of a graph and the closeness
//! bound it certifies.
//!
//! With g′_j the generators of G′ = (V₁ ∪ V_connect, E₁ ∪ E_connect), the test
//! draws k ∈ {0,1}^{N₁} uniformly and measures s_k = ∏_{j∈V₁} (g′_j)^{k_j}.
//! Averaging over k gives p = ½(1 + ⟨Ψ|P|Ψ⟩) with P = ∏_{j∈V₁} (I + g′_j)/2.
//!
//! The closeness check takes a pure state. A mixed prover state is a convex
//! combination of pure ones, which is how the bound would extend to it; that
//! extension is not checked here.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graphstate::{stabilizer_generator, Graph, StabilizerTableau};
use crate::qcore::matrix::C64;
use crate::qcore::pauli::PauliString;
use crate::qcore::state::StateVector;
use crate::{Error, Result};

/// Projections with squared norm below this are treated as zero.
const ZERO_WEIGHT: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct RegionDecomposition {
    pub n: usize,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub v_connect: Vec<usize>,
    pub e1: Vec<(usize, usize)>,
    pub e_connect: Vec<(usize, usize)>,
    /// G′ on `g_prime_vertices` (local vertex i is global `g_prime_vertices[i]`).
    pub g_prime: Graph,
    pub g_prime_vertices: Vec<usize>,
    /// G″ on V₁ (local vertex i is global `v1[i]`).
    pub g_double_prime: Graph,
    /// g′_j for j ∈ V₁ (in `v1` order), embedded in the full N-qubit register.
    generators: Vec<PauliString>,
}

impl RegionDecomposition {
    pub fn n1(&self) -> usize {
        self.v1.len()
    }

    pub fn n2(&self) -> usize {
        self.v2.len()
    }

    /// g′_j of the i-th vertex of V₁ on the full register.
    pub fn generator(&self, i: usize) -> &PauliString {
        &self.generators[i]
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }
}

pub fn decompose(g: &Graph, v1: &[usize]) -> Result<RegionDecomposition> {
    let n = g.n_vertices();
    let mut in_v1 = vec![false; n];
    for &v in v1 {
        if v >= n {
            return Err(Error::InvalidGraph(format!("V1 vertex {v} out of range")));
        }
        in_v1[v] = true;
    }
    let v1: Vec<usize> = (0..n).filter(|&v| in_v1[v]).collect();
    let v2: Vec<usize> = (0..n).filter(|&v| !in_v1[v]).collect();
    let e1: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| in_v1[a] && in_v1[b])
        .collect();
    let e_connect: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| in_v1[a] != in_v1[b])
        .collect();
    let mut is_connect = vec![false; n];
    for &(a, b) in &e_connect {
        is_connect[if in_v1[a] { b } else { a }] = true;
    }
    let v_connect: Vec<usize> = (0..n).filter(|&v| is_connect[v]).collect();
    let g_prime_vertices: Vec<usize> = (0..n).filter(|&v| in_v1[v] || is_connect[v]).collect();

    let mut local = vec![usize::MAX; n];
    for (i, &v) in g_prime_vertices.iter().enumerate() {
        local[v] = i;
    }
    let g_prime = Graph::new(
        g_prime_vertices.len(),
        e1.iter().chain(&e_connect).map(|&(a, b)| (local[a], local[b])),
    )?;
    let g_double_prime = g.induced(&v1)?;

    // Every neighbour of a V₁ vertex lies in V₁ ∪ V_connect, so g′_j = g_j.
    let generators = v1
        .iter()
        .map(|&j| stabilizer_generator(g, j))
        .collect::<Result<Vec<_>>>()?;

    Ok(RegionDecomposition {
        n,
        v1,
        v2,
        v_connect,
        e1,
        e_connect,
        g_prime,
        g_prime_vertices,
        g_double_prime,
        generators,
    })
}

/// s_k = ∏_{j∈V₁} (g′_j)^{k_j}, with the exact group phase; `k[i]` refers to
/// the i-th vertex of V₁ (ascending).
pub fn s_k_operator(d: &RegionDecomposition, k: &[bool]) -> Result<PauliString> {
    if k.len() != d.n1() {
        return Err(Error::DimensionMismatch {
            expected: d.n1(),
            found: k.len(),
        });
    }
    let mut s = PauliString::identity(d.n);
    for (gen, _) in d.generators.iter().zip(k).filter(|(_, &bit)| bit) {
        s = s.mul(gen)?;
    }
    Ok(s)
}

fn check_state(state: &StateVector, d: &RegionDecomposition) -> Result<()> {
    if state.n_qubits() != d.n {
        return Err(Error::DimensionMismatch {
            expected: d.n,
            found: state.n_qubits(),
        });
    }
    Ok(())
}

/// (I + s·P)/2 |ψ⟩, unnormalized.
fn half_projection(psi: &StateVector, p: &PauliString, sign: f64) -> Result<StateVector> {
    let pp = p.apply(psi)?;
    let amps: Vec<C64> = psi
        .amplitudes()
        .iter()
        .zip(pp.amplitudes())
        .map(|(a, b)| (a + b * sign) * 0.5)
        .collect();
    StateVector::from_amplitudes(amps)
}

/// P|Ψ⟩ with P = ∏ (I + g_j)/2 over the given commuting generators.
fn project_onto(psi: &StateVector, generators: &[PauliString]) -> Result<StateVector> {
    let mut v = psi.clone();
    for g in generators {
        v = half_projection(&v, g, 1.0)?;
    }
    Ok(v)
}

/// ⟨Ψ|P|Ψ⟩
pub fn projector_expectation(state: &StateVector, d: &RegionDecomposition) -> Result<f64> {
    check_state(state, d)?;
    let v = project_onto(state, &d.generators)?;
    Ok(state.inner(&v).re)
}

/// p_test = ½(1 + ⟨Ψ|P|Ψ⟩).
pub fn exact_pass_probability(state: &StateVector, d: &RegionDecomposition) -> Result<f64> {
    Ok(0.5 * (1.0 + projector_expectation(state, d)?))
}

/// p_test as the explicit average 2^{−N₁} Σ_k ⟨Ψ|(I + s_k)/2|Ψ⟩.
pub fn pass_probability_by_sum(state: &StateVector, d: &RegionDecomposition) -> Result<f64> {
    check_state(state, d)?;
    let n1 = d.n1();
    if n1 > 20 {
        return Err(Error::BranchBudgetExceeded {
            needed: n1,
            budget: 20,
        });
    }
    let mut total = 0.0;
    for bits in 0..1usize << n1 {
        let k: Vec<bool> = (0..n1).map(|i| (bits >> i) & 1 == 1).collect();
        let s = s_k_operator(d, &k)?;
        total += 0.5 * (1.0 + s.expectation(state)?);
    }
    Ok(total / (1usize << n1) as f64)
}

/// States on which a Pauli product can be measured projectively.
pub trait PauliMeasure {
    fn measure_pauli(&mut self, p: &PauliString, rng: &mut dyn rand::RngCore) -> Result<i8>;
}

impl PauliMeasure for StateVector {
    /// Born rule with the exact projectors (I ± P)/2; the state is replaced
    /// by the normalized post-measurement state.
    fn measure_pauli(&mut self, p: &PauliString, rng: &mut dyn rand::RngCore) -> Result<i8> {
        let plus = half_projection(self, p, 1.0)?;
        let p_plus = plus.norm().powi(2) / self.norm().powi(2);
        let sign = if rng.random::<f64>() < p_plus { 1.0 } else { -1.0 };
        let mut post = if sign > 0.0 {
            plus
        } else {
            half_projection(self, p, -1.0)?
        };
        if post.normalize() < ZERO_WEIGHT.sqrt() {
            return Err(Error::ImpossibleOutcome(if sign > 0.0 { p_plus } else { 1.0 - p_plus }));
        }
        *self = post;
        Ok(sign as i8)
    }
}

impl PauliMeasure for StabilizerTableau {
    fn measure_pauli(&mut self, p: &PauliString, mut rng: &mut dyn rand::RngCore) -> Result<i8> {
        StabilizerTableau::measure_pauli(self, p, &mut rng)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabTestOutcome {
    pub k: Vec<bool>,
    pub measured_value: i8,
    pub passed: bool,
}

/// One round of the test: uniform k, projective measurement of s_k. The state
/// keeps its post-measurement value.
pub fn run_stabilizer_test<S: PauliMeasure + ?Sized>(
    state: &mut S,
    d: &RegionDecomposition,
    rng: &mut dyn rand::RngCore,
) -> Result<StabTestOutcome> {
    let k: Vec<bool> = (0..d.n1()).map(|_| rng.random_bool(0.5)).collect();
    let s = s_k_operator(d, &k)?;
    let measured_value = state.measure_pauli(&s, rng)?;
    Ok(StabTestOutcome {
        k,
        measured_value,
        passed: measured_value == 1,
    })
}

/// |Ψ′⟩ = W(|G″⟩ ⊗ ξ) closest to |Ψ⟩, with R = ‖(|G″⟩⟨G″| ⊗ I) W†|Ψ⟩‖².
pub fn closest_ideal_state(state: &StateVector, d: &RegionDecomposition) -> Result<(StateVector, f64)> {
    check_state(state, d)?;
    let mut v = state.clone();
    for &(a, b) in &d.e_connect {
        v.apply_cz(a, b)?;
    }
    // |G″⟩ is the unique joint +1 eigenvector of the G″ generators on V₁
    let local = d
        .v1
        .iter()
        .enumerate()
        .map(|(i, _)| stabilizer_generator(&d.g_double_prime, i))
        .collect::<Result<Vec<_>>>()?;
    let embedded: Vec<PauliString> = local
        .iter()
        .map(|g| {
            let mut p = PauliString::identity(d.n);
            for (i, &l) in g.letters.iter().enumerate() {
                p.letters[d.v1[i]] = l;
            }
            p
        })
        .collect();
    let mut projected = project_onto(&v, &embedded)?;
    let r = projected.norm().powi(2);
    if r < ZERO_WEIGHT {
        return Err(Error::OrthogonalToTestSubspace);
    }
    projected.normalize();
    for &(a, b) in &d.e_connect {
        projected.apply_cz(a, b)?;
    }
    Ok((projected, r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    /// Realized 1 − p_test of the given state.
    pub epsilon: f64,
    pub distance: f64,
    pub bound: f64,
    pub holds: bool,
    pub overlap_weight: f64,
}

/// √(4ε − 4ε²)
pub fn closeness_bound(epsilon: f64) -> f64 {
    (4.0 * epsilon - 4.0 * epsilon * epsilon).max(0.0).sqrt()
}

/// Compares the pure-state distance √(1 − |⟨Ψ|Ψ′⟩|²) with √(4ε − 4ε²).
pub fn check_closeness_bound(state: &StateVector, d: &RegionDecomposition) -> Result<ClosenessReport> {
    let p = exact_pass_probability(state, d)?;
    let epsilon = (1.0 - p).max(0.0);
    let bound = closeness_bound(epsilon);
    let (distance, overlap_weight) = match closest_ideal_state(state, d) {
        Ok((psi_prime, r)) => {
            let f = state.inner(&psi_prime).norm_sqr() / state.norm().powi(2);
            ((1.0 - f).max(0.0).sqrt(), r)
        }
        Err(Error::OrthogonalToTestSubspace) => (1.0, 0.0),
        Err(e) => return Err(e),
    };
    Ok(ClosenessReport {
        epsilon,
        distance,
        bound,
        holds: distance <= bound + 1e-9,
        overlap_weight,
    })
}

/// Batch summary of repeated tests on fresh copies of one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabTestReport {
    pub n1: usize,
    pub trials: usize,
    pub pass_rate: f64,
    pub exact_p: Option<f64>,
    pub epsilon: f64,
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

/// Runs `trials` independent tests, each on a fresh copy of `state`. Since
/// each copy is discarded, a trial only needs the outcome distribution
/// ½(1 ± ⟨s_k⟩).
pub fn batch_report(
    state: &StateVector,
    d: &RegionDecomposition,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<StabTestReport> {
    check_state(state, d)?;
    let mut passes = 0usize;
    for _ in 0..trials {
        let k: Vec<bool> = (0..d.n1()).map(|_| rng.random_bool(0.5)).collect();
        let s = s_k_operator(d, &k)?;
        let p_plus = 0.5 * (1.0 + s.expectation(state)?);
        if rng.random::<f64>() < p_plus {
            passes += 1;
        }
    }
    let closeness = check_closeness_bound(state, d)?;
    Ok(StabTestReport {
        n1: d.n1(),
        trials,
        pass_rate: passes as f64 / trials.max(1) as f64,
        exact_p: Some(1.0 - closeness.epsilon),
        epsilon: closeness.epsilon,
        bound: closeness.bound,
        distance: Some(closeness.distance),
        holds: Some(closeness.holds),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstate::{build_graph_state, syndrome_state};
    use crate::qcore::gates;
    use crate::qcore::matrix::CMatrix;
    use crate::qcore::random::haar_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decompose_edge() {
        let d = decompose(&Graph::line(2), &[0]).unwrap();
        assert_eq!(d.v_connect, vec![1]);
        assert_eq!(d.e_connect, vec![(0, 1)]);
        assert_eq!(d.g_double_prime.n_vertices(), 1);
        assert!(d.e1.is_empty());
    }

    #[test]
    fn decompose_lattice_block() {
        // left 2 columns of a 3×3 lattice (columns 0, 1 of every row)
        let g = Graph::lattice(3, 3);
        let v1 = [0, 1, 3, 4, 6, 7];
        let d = decompose(&g, &v1).unwrap();
        assert_eq!(d.v_connect, vec![2, 5, 8]);
        assert_eq!(d.e_connect.len(), 3);
        assert_eq!(d.e1.len(), 7);
        assert_eq!(d.g_prime.n_vertices(), 9);
        assert_eq!(d.g_prime.edges().len(), 10);
    }

    #[test]
    fn decompose_disconnected_and_full() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let d = decompose(&g, &[0, 1]).unwrap();
        assert!(d.e_connect.is_empty());
        assert_eq!(d.g_prime, d.g_double_prime);
        let full = decompose(&g, &[0, 1, 2, 3]).unwrap();
        assert!(full.v_connect.is_empty());
        assert_eq!(full.g_prime, g);
    }

    #[test]
    fn s_k_examples() {
        let g = Graph::line(3);
        let d = decompose(&g, &[0, 1]).unwrap();
        assert!(s_k_operator(&d, &[false, false]).unwrap().is_identity());
        assert_eq!(s_k_operator(&d, &[true, false]).unwrap(), stabilizer_generator(&g, 0).unwrap());
        // g0 g1 = (X Z I)(Z X Z): letters Y Y Z with phase (−i)(i) = 1
        let s = s_k_operator(&d, &[true, true]).unwrap();
        let dense = &stabilizer_generator(&g, 0).unwrap().to_matrix()
            * &stabilizer_generator(&g, 1).unwrap().to_matrix();
        assert!(s.to_matrix().max_abs_diff(&dense) < 1e-15);
        assert_eq!(s.to_string(), "+YYZ");
    }

    #[test]
    fn honest_state_always_passes() {
        let g = Graph::lattice(3, 2);
        let d = decompose(&g, &[0, 1, 3, 4]).unwrap();
        let psi = build_graph_state(&g).unwrap();
        assert!((exact_pass_probability(&psi, &d).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut s = psi.clone();
            assert!(run_stabilizer_test(&mut s, &d, &mut rng).unwrap().passed);
            let mut t = StabilizerTableau::from_graph(&g);
            assert!(run_stabilizer_test(&mut t, &d, &mut rng).unwrap().passed);
        }
    }

    #[test]
    fn z_flip_passes_half() {
        let g = Graph::line(4);
        let d = decompose(&g, &[1, 2]).unwrap();
        let mut psi = build_graph_state(&g).unwrap();
        psi.apply_single(1, &gates::Z).unwrap();
        assert!((exact_pass_probability(&psi, &d).unwrap() - 0.5).abs() < 1e-12);
        assert!((pass_probability_by_sum(&psi, &d).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_region() {
        // V₁ part maximally mixed: average over the syndrome basis on V₁
        let g = Graph::ring(5).unwrap();
        let v1 = [0, 1, 2];
        let d = decompose(&g, &v1).unwrap();
        let mut avg = 0.0;
        for u in 0..8usize {
            let mut bits = vec![false; 5];
            for (i, &v) in v1.iter().enumerate() {
                bits[v] = (u >> i) & 1 == 1;
            }
            avg += exact_pass_probability(&syndrome_state(&g, &bits).unwrap(), &d).unwrap() / 8.0;
        }
        let expect = 0.5 + 0.5f64.powi(v1.len() as i32 + 1);
        assert!((avg - expect).abs() < 1e-12);
    }

    #[test]
    fn ideal_form_passes_for_any_xi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Graph::lattice(2, 3);
        let v1 = [0, 1, 2];
        let d = decompose(&g, &v1).unwrap();
        // W(|G″⟩ ⊗ ξ): V₁ = qubits {0,1,2} low, V₂ = {3,4,5} high
        let gpp = build_graph_state(&d.g_double_prime).unwrap();
        for _ in 0..5 {
            let xi = haar_state(3, &mut rng);
            let mut psi = xi.tensor(&gpp);
            for &(a, b) in &d.e_connect {
                psi.apply_cz(a, b).unwrap();
            }
            assert!((exact_pass_probability(&psi, &d).unwrap() - 1.0).abs() < 1e-12);
            let (pp, r) = closest_ideal_state(&psi, &d).unwrap();
            assert!((r - 1.0).abs() < 1e-12);
            assert!(pp.equal_up_to_phase(&psi, 1e-12));
        }
    }

    #[test]
    fn full_graph_state_is_its_own_ideal() {
        let g = Graph::lattice(2, 3);
        let d = decompose(&g, &[0, 2, 4]).unwrap();
        let psi = build_graph_state(&g).unwrap();
        let (pp, r) = closest_ideal_state(&psi, &d).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(pp.equal_up_to_phase(&psi, 1e-12));
    }

    #[test]
    fn perturbed_overlap_weight() {
        let g = Graph::line(4);
        let d = decompose(&g, &[0, 1]).unwrap();
        let ideal = build_graph_state(&g).unwrap();
        let mut bits = vec![false; 4];
        bits[0] = true;
        let orth = syndrome_state(&g, &bits).unwrap();
        let delta: f64 = 0.04;
        let amps = ideal
            .amplitudes()
            .iter()
            .zip(orth.amplitudes())
            .map(|(a, b)| a * (1.0 - delta).sqrt() + b * delta.sqrt())
            .collect();
        let psi = StateVector::from_amplitudes(amps).unwrap();
        let (_, r) = closest_ideal_state(&psi, &d).unwrap();
        assert!((r - 0.96).abs() < 1e-9);
        let report = check_closeness_bound(&psi, &d).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn orthogonal_state_is_rejected() {
        let g = Graph::line(2);
        let d = decompose(&g, &[0, 1]).unwrap();
        let psi = syndrome_state(&g, &[true, false]).unwrap();
        assert!(matches!(closest_ideal_state(&psi, &d), Err(Error::OrthogonalToTestSubspace)));
        let report = check_closeness_bound(&psi, &d).unwrap();
        assert_eq!(report.distance, 1.0);
        assert!(report.holds);
    }

    #[test]
    fn bound_closed_form() {
        assert!((closeness_bound(0.01) - 0.0396f64.sqrt()).abs() < 1e-15);
        let g = Graph::line(3);
        let d = decompose(&g, &[0, 1]).unwrap();
        let r = check_closeness_bound(&build_graph_state(&g).unwrap(), &d).unwrap();
        assert!(r.epsilon.abs() < 1e-12 && r.distance < 1e-6 && r.bound < 1e-5);
    }

    #[test]
    fn projector_relation_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let g = Graph::random(5, 0.5, &mut rng);
            let v1: Vec<usize> = (0..5).filter(|_| rng.random_bool(0.6)).collect();
            let d = decompose(&g, &v1).unwrap();
            let dim = 1 << 5;
            let mut avg = CMatrix::zeros(dim, dim);
            for bits in 0..1usize << d.n1() {
                let k: Vec<bool> = (0..d.n1()).map(|i| (bits >> i) & 1 == 1).collect();
                avg = &avg + &s_k_operator(&d, &k).unwrap().to_matrix();
            }
            avg = avg.scale_real(1.0 / (1 << d.n1()) as f64);
            let mut prod = CMatrix::identity(dim);
            for gen in d.generators() {
                let half = (&CMatrix::identity(dim) + &gen.to_matrix()).scale_real(0.5);
                prod = &prod * &half;
            }
            assert!(avg.max_abs_diff(&prod) < 1e-10);
            let psi = haar_state(5, &mut rng);
            let a = exact_pass_probability(&psi, &d).unwrap();
            let b = pass_probability_by_sum(&psi, &d).unwrap();
            assert!((a - b).abs() < 1e-10);
            assert!(check_closeness_bound(&psi, &d).unwrap().holds);
        }
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = Graph::line(4);
        let d = decompose(&g, &[0, 1, 2]).unwrap();
        let psi = haar_state(4, &mut rng);
        let exact = exact_pass_probability(&psi, &d).unwrap();
        let trials = 20_000;
        let mut pass = 0;
        for _ in 0..trials {
            let mut s = psi.clone();
            if run_stabilizer_test(&mut s, &d, &mut rng).unwrap().passed {
                pass += 1;
            }
        }
        let p_hat = pass as f64 / trials as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((p_hat - exact).abs() <= 4.0 * sigma + 1e-12);
    }
}
