use super::graph::Graph;
use super::tableau::StabilizerTableau;
use crate::qcore::matrix::C64;
use crate::qcore::pauli::{Pauli, PauliString};
use crate::qcore::state::StateVector;
use crate::qcore::DENSE_QUBIT_LIMIT;
use crate::{Error, Result};

fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::DenseBudgetExceeded {
            needed: n,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    Ok(())
}

/// |G⟩ = ∏_{(i,j)∈E} CZ_{ij} |+⟩^N. Amplitude of |b⟩ is
/// (−1)^{#edges inside b} / 2^{N/2}.
pub fn build_graph_state(g: &Graph) -> Result<StateVector> {
    syndrome_state(g, &vec![false; g.n_vertices()])
}

/// g_j = X_j ∏_{i∈S_j} Z_i
pub fn stabilizer_generator(g: &Graph, j: usize) -> Result<PauliString> {
    if j >= g.n_vertices() {
        return Err(Error::QubitOutOfRange {
            index: j,
            n_qubits: g.n_vertices(),
        });
    }
    let mut p = PauliString::z_string(g.n_vertices(), g.neighbors(j).iter().copied());
    p.letters[j] = Pauli::X;
    Ok(p)
}

/// |G_u⟩ = (∏_{u_j=1} Z_j)|G⟩, so that g_j|G_u⟩ = (−1)^{u_j}|G_u⟩.
pub fn syndrome_state(g: &Graph, u: &[bool]) -> Result<StateVector> {
    let n = g.n_vertices();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    check_dense(n)?;
    let edge_masks: Vec<usize> = g.edges().iter().map(|&(a, b)| (1 << a) | (1 << b)).collect();
    let z_mask = u
        .iter()
        .enumerate()
        .filter(|(_, &bit)| bit)
        .fold(0usize, |m, (j, _)| m | (1 << j));
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let amplitudes = (0..1usize << n)
        .map(|b| {
            let edge_parity = edge_masks.iter().filter(|&&m| b & m == m).count();
            let parity = edge_parity + (b & z_mask).count_ones() as usize;
            C64::new(if parity.is_multiple_of(2) { amp } else { -amp }, 0.0)
        })
        .collect();
    StateVector::from_amplitudes(amplitudes)
}

/// Anything that can report ⟨P⟩ for a Hermitian Pauli product.
pub trait PauliExpectation {
    fn pauli_expectation(&self, p: &PauliString) -> Result<f64>;
}

impl PauliExpectation for StateVector {
    fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        p.expectation(self)
    }
}

impl PauliExpectation for StabilizerTableau {
    fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        self.expectation(p)
    }
}

pub fn pauli_expectation<S: PauliExpectation + ?Sized>(state: &S, p: &PauliString) -> Result<f64> {
    state.pauli_expectation(p)
}

#[derive(Clone, Debug)]
pub enum Representation {
    Dense(StateVector),
    Tableau(StabilizerTableau),
}

/// A graph together with a concrete realization of |G⟩.
#[derive(Clone, Debug)]
pub struct GraphState {
    pub graph: Graph,
    pub representation: Representation,
}

impl GraphState {
    pub fn dense(graph: &Graph) -> Result<Self> {
        Ok(Self {
            representation: Representation::Dense(build_graph_state(graph)?),
            graph: graph.clone(),
        })
    }

    pub fn tableau(graph: &Graph) -> Self {
        Self {
            representation: Representation::Tableau(StabilizerTableau::from_graph(graph)),
            graph: graph.clone(),
        }
    }

    pub fn generator(&self, j: usize) -> Result<PauliString> {
        stabilizer_generator(&self.graph, j)
    }
}

impl PauliExpectation for GraphState {
    fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        match &self.representation {
            Representation::Dense(s) => s.pauli_expectation(p),
            Representation::Tableau(t) => t.pauli_expectation(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: apply CZ gates one by one to |+⟩^N.
    fn brute_force(g: &Graph) -> StateVector {
        let mut s = StateVector::plus(g.n_vertices());
        for &(a, b) in g.edges() {
            s.apply_cz(a, b).unwrap();
        }
        s
    }

    #[test]
    fn single_vertex_is_plus() {
        let s = build_graph_state(&Graph::empty(1)).unwrap();
        assert!(s.equal_up_to_phase(&StateVector::plus(1), 1e-15));
    }

    #[test]
    fn edge_state() {
        let s = build_graph_state(&Graph::line(2)).unwrap();
        let signs = [1.0, 1.0, 1.0, -1.0];
        for (a, sign) in s.amplitudes().iter().zip(signs) {
            assert!((a.re - 0.5 * sign).abs() < 1e-15);
        }
    }

    #[test]
    fn three_line_sign_pattern() {
        let s = build_graph_state(&Graph::line(3)).unwrap();
        let oracle = brute_force(&Graph::line(3));
        let signs = [1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0];
        let amp = 1.0 / 8f64.sqrt();
        for ((a, o), sign) in s.amplitudes().iter().zip(oracle.amplitudes()).zip(signs) {
            assert!((a.re - amp * sign).abs() < 1e-15);
            assert!((a - o).norm() < 1e-15);
        }
    }

    #[test]
    fn generators() {
        let g = Graph::line(2);
        assert_eq!(stabilizer_generator(&g, 0).unwrap().to_string(), "+XZ");
        assert_eq!(stabilizer_generator(&Graph::empty(3), 1).unwrap().to_string(), "+IXI");
        let cross = Graph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(stabilizer_generator(&cross, 0).unwrap().to_string(), "+XZZZZ");
    }

    #[test]
    fn generators_stabilize_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=10 {
            let g = Graph::random(n, 0.4, &mut rng);
            let s = build_graph_state(&g).unwrap();
            assert!((s.inner(&brute_force(&g)).re - 1.0).abs() < 1e-12);
            for j in 0..n {
                let gj = stabilizer_generator(&g, j).unwrap();
                assert!((pauli_expectation(&s, &gj).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn syndrome_eigenvalues_and_basis() {
        let g = Graph::line(3);
        let mut states = Vec::new();
        for u in 0..8usize {
            let bits: Vec<bool> = (0..3).map(|j| (u >> j) & 1 == 1).collect();
            let s = syndrome_state(&g, &bits).unwrap();
            for (j, &flipped) in bits.iter().enumerate() {
                let e = pauli_expectation(&s, &stabilizer_generator(&g, j).unwrap()).unwrap();
                let expect = if flipped { -1.0 } else { 1.0 };
                assert!((e - expect).abs() < 1e-12);
            }
            // Z-string oracle
            let mut direct = build_graph_state(&g).unwrap();
            for j in (0..3).filter(|&j| bits[j]) {
                direct.apply_single(j, &gates::Z).unwrap();
            }
            assert!(s.equal_up_to_phase(&direct, 1e-10));
            states.push(s);
        }
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((sa.inner(sb).norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_state_x_expectation() {
        let x = PauliString::single(1, 0, Pauli::X);
        assert_eq!(pauli_expectation(&StateVector::zeros(1), &x).unwrap(), 0.0);
    }
}
