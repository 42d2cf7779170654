//! Graphs of the two protocols.
//!
//! Vertices are numbered pattern first, then stars, then white circles, then
//! white squares. Every output in the box gains a chain box–star–white, so
//! measuring the box and star vertices in the X basis teleports the box
//! state onto the white vertex.

use serde::{Deserialize, Serialize};

use crate::distinguish::{QcdInstance, QsdInstance};
use crate::graphstate::{Graph, Roles};
use crate::mbqc::{compile_pair, Circuit, MeasurementPattern, WireInput};
use crate::qcore::gates::Gate;
use crate::qcore::{Channel, DENSE_QUBIT_LIMIT};
use crate::stabtest::{decompose, RegionDecomposition};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Qsd,
    Qcd,
}

#[derive(Clone, Debug)]
pub struct ProtocolGraph {
    pub protocol: Protocol,
    pub graph: Graph,
    /// Patterns for a = 0 and a = 1 on the shared pattern region.
    pub patterns: [MeasurementPattern; 2],
    /// Black circles; the stabilizer test uses them as V₁.
    pub circles: Vec<usize>,
    /// Pattern input vertices carrying the channel input (QCD only).
    pub black_squares: Vec<usize>,
    /// Purification of the channel input, kept by the prover (QCD only).
    pub white_squares: Vec<usize>,
    /// Output vertices whose state is delivered to the prover.
    pub output_box: Vec<usize>,
    pub stars: Vec<usize>,
    pub whites: Vec<usize>,
    pub decomposition: RegionDecomposition,
}

fn gate_circuit(c: &Channel) -> Result<&crate::qcore::channel::Circuit> {
    c.circuit()
        .ok_or_else(|| Error::InvalidCircuit("instance channel has no gate description".into()))
}

impl ProtocolGraph {
    pub fn for_qsd(inst: &QsdInstance) -> Result<Self> {
        let m = inst.m();
        let build = |a: u8| -> Result<Circuit> {
            Circuit::from_zero(m).with_gates(gate_circuit(inst.q(a))?.gates.iter().copied())
        };
        let (p0, p1) = compile_pair(&build(0)?, &build(1)?)?;
        Self::assemble(Protocol::Qsd, p0, p1, inst.k(), 0)
    }

    pub fn for_qcd(inst: &QcdInstance) -> Result<Self> {
        let (c0, c1) = (gate_circuit(inst.q(0))?, gate_circuit(inst.q(1))?);
        let n = inst.n();
        let wires = c0.wires.max(c1.wires);
        let inputs: Vec<WireInput> = (0..wires)
            .map(|w| if w < n { WireInput::Open } else { WireInput::Zero })
            .collect();
        // H·H on every input wire guarantees the input vertex is measured.
        let build = |gates: &[Gate]| -> Result<Circuit> {
            let lead = (0..n).flat_map(|w| [Gate::H(w), Gate::H(w)]);
            Circuit::with_inputs(wires, inputs.clone())?.with_gates(lead.chain(gates.iter().copied()))
        };
        let (p0, p1) = compile_pair(&build(&c0.gates)?, &build(&c1.gates)?)?;
        Self::assemble(Protocol::Qcd, p0, p1, inst.m(), n)
    }

    fn assemble(
        protocol: Protocol,
        p0: MeasurementPattern,
        p1: MeasurementPattern,
        n_box: usize,
        n_squares: usize,
    ) -> Result<Self> {
        if p0.graph.edges() != p1.graph.edges() || p0.output_vertices != p1.output_vertices {
            return Err(Error::InvalidPattern("patterns do not share a graph".into()));
        }
        let np = p0.n_vertices();
        let total = np + 2 * n_box + n_squares;
        if total > DENSE_QUBIT_LIMIT {
            return Err(Error::DenseBudgetExceeded {
                needed: total,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let output_box: Vec<usize> = p0.output_vertices[..n_box].to_vec();
        let stars: Vec<usize> = (np..np + n_box).collect();
        let whites: Vec<usize> = (np + n_box..np + 2 * n_box).collect();
        let white_squares: Vec<usize> = (np + 2 * n_box..total).collect();
        let black_squares: Vec<usize> = p0.input_vertices[..n_squares].to_vec();
        let circles: Vec<usize> = (0..np).filter(|v| !black_squares.contains(v)).collect();

        let mut edges = p0.graph.edges().to_vec();
        for i in 0..n_box {
            edges.push((output_box[i], stars[i]));
            edges.push((stars[i], whites[i]));
        }
        let mut graph = Graph::new(total, edges)?;
        let mut square = black_squares.clone();
        square.extend(&white_squares);
        let mut white = whites.clone();
        white.extend(&white_squares);
        graph.roles = Roles {
            circle: circles.clone(),
            star: stars.clone(),
            square,
            white,
            output_box: output_box.clone(),
        };
        let decomposition = decompose(&graph, &circles)?;
        Ok(Self {
            protocol,
            graph,
            patterns: [p0, p1],
            circles,
            black_squares,
            white_squares,
            output_box,
            stars,
            whites,
            decomposition,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    /// Black vertices: circles, black squares and stars.
    pub fn verifier_held(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .circles
            .iter()
            .chain(&self.black_squares)
            .chain(&self.stars)
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    /// White vertices: whites and white squares.
    pub fn prover_held(&self) -> Vec<usize> {
        self.whites.iter().chain(&self.white_squares).copied().collect()
    }

    /// Qubits on which the prover bases its answer, in the order of the
    /// reference states: whites by wire, then white squares.
    pub fn answer_register(&self) -> Vec<usize> {
        self.prover_held()
    }

    /// Edges between black squares and circles (W₁).
    pub fn w1_edges(&self) -> Vec<(usize, usize)> {
        self.crossing(&self.black_squares, &self.circles)
    }

    /// Edges between the box and the stars (W₂).
    pub fn w2_edges(&self) -> Vec<(usize, usize)> {
        self.crossing(&self.output_box, &self.stars)
    }

    fn crossing(&self, a: &[usize], b: &[usize]) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| (a.contains(&u) && b.contains(&v)) || (a.contains(&v) && b.contains(&u)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qsd_layout_invariants() {
        let g = ProtocolGraph::for_qsd(&QsdInstance::identical_demo()).unwrap();
        assert_eq!(g.output_box.len(), 1);
        for (i, &o) in g.output_box.iter().enumerate() {
            let stars: Vec<_> = g.graph.neighbors(o).iter().filter(|v| g.stars.contains(v)).collect();
            assert_eq!(stars, vec![&g.stars[i]]);
            assert_eq!(g.graph.degree(g.stars[i]), 2);
            assert_eq!(g.graph.neighbors(g.whites[i]), &[g.stars[i]]);
        }
        assert!(g.black_squares.is_empty());
        assert_eq!(g.decomposition.v1, g.circles);
        let mut all = g.verifier_held();
        all.extend(g.prover_held());
        all.sort_unstable();
        assert_eq!(all, (0..g.n_vertices()).collect::<Vec<_>>());
        assert_eq!(g.w2_edges().len(), 1);
    }

    #[test]
    fn qcd_layout_invariants() {
        let inst = QcdInstance::identity_vs_x_demo();
        let g = ProtocolGraph::for_qcd(&inst).unwrap();
        assert_eq!(g.black_squares.len(), 1);
        assert_eq!(g.white_squares.len(), 1);
        let w1 = g.w1_edges();
        assert_eq!(w1.len(), 1);
        assert!(g.black_squares.iter().all(|s| !g.circles.contains(s)));
        // Every black square is measured by both patterns.
        for p in &g.patterns {
            for s in &g.black_squares {
                assert!(p.measurements.iter().any(|m| m.vertex == *s));
            }
        }
        assert_eq!(g.graph.degree(g.white_squares[0]), 0);
        assert_eq!(g.prover_held(), vec![g.whites[0], g.white_squares[0]]);
    }
}
