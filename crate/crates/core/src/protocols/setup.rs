//! Per-instance data shared by every run: layout, reference states, the
//! Helstrom measurement and the honest prover state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layout::{Protocol, ProtocolGraph};
use crate::distinguish::{diamond_distance, helstrom_povm, BoundReport, QcdInstance, QsdInstance};
use crate::qcore::channel::apply_low_block;
use crate::qcore::{gates, DensityMatrix, Povm, StateVector};
use crate::Result;

/// Restarts used when searching for the honest QCD input state.
pub const WITNESS_RESTARTS: usize = 10;
const WITNESS_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct ProtocolSetup {
    pub layout: ProtocolGraph,
    /// States the prover discriminates after corrections, on
    /// [`ProtocolGraph::answer_register`].
    pub references: [DensityMatrix; 2],
    pub helstrom: Povm,
    pub honest_state: StateVector,
    /// Input state |ψ⟩ on channel input (low) and purification (high).
    pub witness: Option<StateVector>,
    /// Probability of running the computation.
    pub q: f64,
    pub epsilon: f64,
    pub bounds: BoundReport,
}

impl ProtocolSetup {
    pub fn qsd(inst: &QsdInstance, q: f64, epsilon: f64, bounds: BoundReport) -> Result<Self> {
        let layout = ProtocolGraph::for_qsd(inst)?;
        let references = [inst.output_state(0)?, inst.output_state(1)?];
        let honest_state = honest_graph_state(&layout, None)?;
        Self::finish(layout, references, honest_state, None, q, epsilon, bounds)
    }

    /// The honest input is the best see-saw witness for ‖Q₀ − Q₁‖⋄.
    pub fn qcd(inst: &QcdInstance, q: f64, epsilon: f64, bounds: BoundReport) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
        let witness = diamond_distance(inst.q(0), inst.q(1), WITNESS_RESTARTS, &mut rng)?.witness;
        Self::qcd_with_witness(inst, witness, q, epsilon, bounds)
    }

    pub fn qcd_with_witness(
        inst: &QcdInstance,
        witness: StateVector,
        q: f64,
        epsilon: f64,
        bounds: BoundReport,
    ) -> Result<Self> {
        let layout = ProtocolGraph::for_qcd(inst)?;
        if witness.n_qubits() != 2 * inst.n() {
            return Err(crate::Error::DimensionMismatch {
                expected: 2 * inst.n(),
                found: witness.n_qubits(),
            });
        }
        let psi = DensityMatrix::from_pure(&witness);
        let reference = |i: u8| -> Result<DensityMatrix> {
            Ok(DensityMatrix::from_matrix_unchecked(
                inst.m() + inst.n(),
                apply_low_block(inst.q(i), psi.matrix())?,
            ))
        };
        let references = [reference(0)?, reference(1)?];
        let honest_state = honest_graph_state(&layout, Some(&witness))?;
        Self::finish(layout, references, honest_state, Some(witness), q, epsilon, bounds)
    }

    fn finish(
        layout: ProtocolGraph,
        references: [DensityMatrix; 2],
        honest_state: StateVector,
        witness: Option<StateVector>,
        q: f64,
        epsilon: f64,
        bounds: BoundReport,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(crate::Error::InvalidParameter(format!("q must lie in [0, 1], got {q}")));
        }
        let helstrom = helstrom_povm(&references[0], &references[1])?;
        Ok(Self {
            layout,
            references,
            helstrom,
            honest_state,
            witness,
            q,
            epsilon,
            bounds,
        })
    }

    pub fn protocol(&self) -> Protocol {
        self.layout.protocol
    }

    pub fn n_vertices(&self) -> usize {
        self.layout.n_vertices()
    }
}

/// |G⟩ for QSD; W₁(|G₁⟩ ⊗ |ψ⟩) for QCD, with ψ's input half on the black
/// squares and its purification on the white squares.
pub fn honest_graph_state(layout: &ProtocolGraph, witness: Option<&StateVector>) -> Result<StateVector> {
    let n = layout.n_vertices();
    let mut state = match witness {
        None => StateVector::plus(n),
        Some(psi) => {
            let mut carriers = layout.black_squares.clone();
            carriers.extend(&layout.white_squares);
            let rest: Vec<usize> = (0..n).filter(|v| !carriers.contains(v)).collect();
            let stacked = StateVector::plus(rest.len()).tensor(psi);
            let mut at = vec![0usize; n];
            for (i, &v) in carriers.iter().chain(&rest).enumerate() {
                at[v] = i;
            }
            stacked.permute_qubits(&at)?
        }
    };
    for &(a, b) in layout.graph.edges() {
        state.apply_cz(a, b)?;
    }
    Ok(state)
}

/// Z on `vertex` of the honest state: the syndrome state with one flipped bit.
pub fn flip_syndrome(state: &mut StateVector, vertex: usize) -> Result<()> {
    state.apply_single(vertex, &gates::Z)
}
