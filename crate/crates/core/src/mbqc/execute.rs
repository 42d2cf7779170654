//! Pattern execution on a dense simulator.
//!
//! Vertices are allocated lazily: a vertex enters the register (as |+⟩) only
//! when a neighbour is about to be measured, and its CZ edges are applied just
//! before the first endpoint is measured. Measured qubits leave the register,
//! so the live width stays close to the circuit width.

use std::collections::HashSet;

use rand::Rng;

use super::pattern::{ByproductRecord, MeasurementPattern};
use crate::qcore::gates;
use crate::qcore::matrix::C64;
use crate::qcore::measure::{enumerate_outcomes, measure_single_qubit};
use crate::qcore::state::StateVector;
use crate::qcore::DENSE_QUBIT_LIMIT;
use crate::{Error, Result};

/// Largest number of measured vertices accepted by exhaustive enumeration.
pub const BRANCH_BUDGET: usize = 20;

#[derive(Clone, Debug)]
pub struct Execution {
    pub output: StateVector,
    pub byproduct: ByproductRecord,
    /// Outcomes in measurement order.
    pub outcomes: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub probability: f64,
    pub output: StateVector,
    pub byproduct: ByproductRecord,
    pub outcomes: Vec<u8>,
}

#[derive(Clone)]
struct Run<'a> {
    p: &'a MeasurementPattern,
    state: StateVector,
    pos: Vec<Option<usize>>,
    live: Vec<usize>,
    applied: HashSet<(usize, usize)>,
    by_vertex: Vec<u8>,
    in_order: Vec<u8>,
    probability: f64,
}

const PLUS: [C64; 2] = [
    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
];

impl<'a> Run<'a> {
    fn new(p: &'a MeasurementPattern, input: StateVector) -> Result<Self> {
        if input.n_qubits() != p.width() {
            return Err(Error::DimensionMismatch {
                expected: p.width(),
                found: input.n_qubits(),
            });
        }
        let mut pos = vec![None; p.n_vertices()];
        for (i, &v) in p.input_vertices.iter().enumerate() {
            pos[v] = Some(i);
        }
        Ok(Self {
            p,
            state: input,
            pos,
            live: p.input_vertices.clone(),
            applied: HashSet::new(),
            by_vertex: vec![0; p.n_vertices()],
            in_order: Vec::with_capacity(p.n_measured()),
            probability: 1.0,
        })
    }

    fn allocate(&mut self, v: usize) -> Result<()> {
        if self.live.len() >= DENSE_QUBIT_LIMIT {
            return Err(Error::DenseBudgetExceeded {
                needed: self.live.len() + 1,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        self.pos[v] = Some(self.live.len());
        self.live.push(v);
        self.state.push_qubit(PLUS);
        Ok(())
    }

    fn entangle(&mut self, v: usize, u: usize) -> Result<()> {
        let e = (v.min(u), v.max(u));
        if self.applied.insert(e) {
            let (a, b) = (self.pos[v].expect("live"), self.pos[u].expect("live"));
            self.state.apply_cz(a, b)?;
        }
        Ok(())
    }

    /// Brings every neighbour of `v` into the register and applies the edges.
    fn prepare(&mut self, v: usize) -> Result<()> {
        if self.pos[v].is_none() {
            self.allocate(v)?;
        }
        let neighbors = self.p.graph.neighbors(v).to_vec();
        for u in neighbors {
            let e = (v.min(u), v.max(u));
            if self.applied.contains(&e) {
                continue;
            }
            if self.pos[u].is_none() {
                self.allocate(u)?;
            }
            self.entangle(v, u)?;
        }
        Ok(())
    }

    fn remove(&mut self, v: usize, outcome: u8, post: StateVector) {
        let q = self.pos[v].take().expect("measured vertex is live");
        self.live.remove(q);
        for (i, &u) in self.live.iter().enumerate().skip(q) {
            self.pos[u] = Some(i);
        }
        self.state = post;
        self.by_vertex[v] = outcome;
        self.in_order.push(outcome);
    }

    fn finish(mut self) -> Result<(f64, Execution)> {
        for &v in &self.p.output_vertices {
            if self.pos[v].is_none() {
                self.allocate(v)?;
            }
        }
        for &(a, b) in self.p.graph.edges() {
            if !self.applied.contains(&(a, b)) {
                if self.pos[a].is_none() || self.pos[b].is_none() {
                    return Err(Error::InvalidPattern(format!("edge ({a}, {b}) never applied")));
                }
                self.entangle(a, b)?;
            }
        }
        let order: Vec<usize> = self
            .p
            .output_vertices
            .iter()
            .map(|&v| self.pos[v].expect("output is live"))
            .collect();
        let output = self.state.permute_qubits(&order)?;
        let byproduct = self.p.byproduct(&self.by_vertex);
        Ok((
            self.probability,
            Execution {
                output,
                byproduct,
                outcomes: self.in_order,
            },
        ))
    }
}

/// Runs the pattern on |+⟩ inputs with Born-rule outcomes.
pub fn execute(p: &MeasurementPattern, rng: &mut impl Rng) -> Result<Execution> {
    execute_with_input(p, StateVector::plus(p.width()), rng)
}

/// Runs the pattern with `input` on the input vertices (wire i = qubit i).
pub fn execute_with_input(
    p: &MeasurementPattern,
    input: StateVector,
    rng: &mut impl Rng,
) -> Result<Execution> {
    let mut run = Run::new(p, input)?;
    for m in &p.measurements {
        run.prepare(m.vertex)?;
        let basis = p.basis_for(m, &run.by_vertex);
        let q = run.pos[m.vertex].expect("prepared");
        let (o, post) = measure_single_qubit(&run.state, q, basis, rng)?;
        run.remove(m.vertex, o, post);
    }
    Ok(run.finish()?.1)
}

/// Every outcome string with its probability, on |+⟩ inputs.
pub fn execute_all_branches(p: &MeasurementPattern) -> Result<Vec<BranchResult>> {
    execute_all_branches_with_input(p, StateVector::plus(p.width()))
}

pub fn execute_all_branches_with_input(
    p: &MeasurementPattern,
    input: StateVector,
) -> Result<Vec<BranchResult>> {
    if p.n_measured() > BRANCH_BUDGET {
        return Err(Error::BranchBudgetExceeded {
            needed: p.n_measured(),
            budget: BRANCH_BUDGET,
        });
    }
    let run = Run::new(p, input)?;
    explore(run, 0)
}

fn explore(mut run: Run<'_>, idx: usize) -> Result<Vec<BranchResult>> {
    let p = run.p;
    let Some(m) = p.measurements.get(idx) else {
        let (probability, e) = run.finish()?;
        return Ok(vec![BranchResult {
            probability,
            output: e.output,
            byproduct: e.byproduct,
            outcomes: e.outcomes,
        }]);
    };
    run.prepare(m.vertex)?;
    let basis = p.basis_for(m, &run.by_vertex);
    let q = run.pos[m.vertex].expect("prepared");
    let [b0, b1] = enumerate_outcomes(&run.state, q, basis)?;
    let mut children = Vec::with_capacity(2);
    for b in [b0, b1] {
        if let Some(post) = b.state {
            let mut child = run.clone();
            child.probability *= b.probability;
            child.remove(m.vertex, b.outcome, post);
            children.push(child);
        }
    }
    if idx < 6 && children.len() == 2 {
        let c1 = children.pop().expect("two children");
        let c0 = children.pop().expect("two children");
        let (r0, r1) = rayon::join(|| explore(c0, idx + 1), || explore(c1, idx + 1));
        let mut out = r0?;
        out.extend(r1?);
        Ok(out)
    } else {
        let mut out = Vec::new();
        for c in children {
            out.extend(explore(c, idx + 1)?);
        }
        Ok(out)
    }
}

/// Applies B† = Z^z X^x to the output register.
pub fn correct_byproduct(state: &StateVector, b: &ByproductRecord) -> Result<StateVector> {
    if b.width() != state.n_qubits() || b.z.len() != b.x.len() {
        return Err(Error::DimensionMismatch {
            expected: state.n_qubits(),
            found: b.width(),
        });
    }
    let mut s = state.clone();
    for (q, (&x, &z)) in b.x.iter().zip(&b.z).enumerate() {
        if x {
            s.apply_single(q, &gates::X)?;
        }
        if z {
            s.apply_single(q, &gates::Z)?;
        }
    }
    Ok(s)
}

/// Applies B = X^x Z^z.
pub fn apply_byproduct(state: &StateVector, b: &ByproductRecord) -> Result<StateVector> {
    let mut s = state.clone();
    for (q, (&x, &z)) in b.x.iter().zip(&b.z).enumerate() {
        if z {
            s.apply_single(q, &gates::Z)?;
        }
        if x {
            s.apply_single(q, &gates::X)?;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbqc::circuit::{random_circuit, Circuit, WireInput};
    use crate::mbqc::pattern::compile;
    use crate::qcore::gates::Gate;
    use crate::qcore::measure::{project_outcome, Basis};
    use crate::qcore::random::haar_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    /// Brute-force oracle for one J step: |ψ⟩|+⟩, CZ, measure qubit 0.
    #[test]
    fn one_wire_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let psi = haar_state(1, &mut rng);
            let theta: f64 = rng.random_range(-3.0..3.0);
            let mut s = StateVector::plus(1).tensor(&psi);
            s.apply_cz(0, 1).unwrap();
            for outcome in 0..2u8 {
                let (_, post) = project_outcome(&s, 0, Basis::XyPlane(-theta), outcome).unwrap();
                let mut want = psi.clone();
                want.apply_single(0, &gates::j(theta)).unwrap();
                if outcome == 1 {
                    want.apply_single(0, &gates::X).unwrap();
                }
                assert!(post.equal_up_to_phase(&want, 1e-12));
            }
        }
    }

    fn check_all_branches(c: &Circuit) {
        let p = compile(c).unwrap();
        let ideal = c.ideal_output().unwrap();
        let branches = execute_all_branches(&p).unwrap();
        let expect_p = 0.5f64.powi(p.n_measured() as i32);
        assert_eq!(branches.len(), 1 << p.n_measured());
        for b in &branches {
            assert!((b.probability - expect_p).abs() < 1e-12);
            let fixed = correct_byproduct(&b.output, &b.byproduct).unwrap();
            assert!(fixed.equal_up_to_phase(&ideal, 1e-9), "{c:?}");
        }
    }

    #[test]
    fn hadamard_on_plus_gives_zero() {
        let c = Circuit::new(1).with_gates([Gate::H(0)]).unwrap();
        let p = compile(&c).unwrap();
        let all_zero = execute_all_branches(&p)
            .unwrap()
            .into_iter()
            .find(|b| b.outcomes.iter().all(|&o| o == 0))
            .unwrap();
        assert!(all_zero.byproduct.is_identity());
        assert!(all_zero.output.equal_up_to_phase(&StateVector::zeros(1), 1e-12));
        check_all_branches(&c);
    }

    #[test]
    fn identity_wire_returns_zero_state() {
        // |0⟩ input then two J(0) = H·H = I
        let c = Circuit::from_zero(2)
            .with_gates([Gate::J(0, 0.0), Gate::J(0, 0.0), Gate::J(1, 0.0), Gate::J(1, 0.0)])
            .unwrap();
        check_all_branches(&c);
    }

    #[test]
    fn hh_cz_gives_edge_state() {
        let c = Circuit::from_zero(2)
            .with_gates([Gate::H(0), Gate::H(1), Gate::Cz(0, 1)])
            .unwrap();
        let edge = crate::graphstate::build_graph_state(&crate::graphstate::Graph::line(2)).unwrap();
        assert!(c.ideal_output().unwrap().equal_up_to_phase(&edge, 1e-12));
        check_all_branches(&c);
    }

    #[test]
    fn convenience_gates() {
        let c = Circuit::from_zero(2)
            .with_gates([Gate::H(0), Gate::Cx(0, 1), Gate::T(1), Gate::S(0), Gate::Y(1), Gate::X(0)])
            .unwrap();
        check_all_branches(&c);
    }

    #[test]
    fn random_circuits_all_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..15 {
            let m = rng.random_range(1..=3);
            let d = rng.random_range(1..=4);
            let input = if rng.random_bool(0.5) { WireInput::Zero } else { WireInput::Open };
            check_all_branches(&random_circuit(m, d, input, &mut rng));
        }
    }

    #[test]
    fn sampled_execution_with_arbitrary_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = Circuit::new(2)
            .with_gates([Gate::T(0), Gate::Cz(0, 1), Gate::H(1), Gate::Rz(0, 0.4)])
            .unwrap();
        let p = compile(&c).unwrap();
        for _ in 0..20 {
            let input = haar_state(2, &mut rng);
            let e = execute_with_input(&p, input.clone(), &mut rng).unwrap();
            let fixed = correct_byproduct(&e.output, &e.byproduct).unwrap();
            assert!(fixed.equal_up_to_phase(&c.apply_to(&input).unwrap(), 1e-9));
        }
    }

    #[test]
    fn byproduct_histogram_is_uniform() {
        let c = Circuit::from_zero(2)
            .with_gates([Gate::J(0, 0.3), Gate::J(1, 1.1), Gate::Cz(0, 1), Gate::J(0, 0.2)])
            .unwrap();
        let p = compile(&c).unwrap();
        let mut hist: HashMap<ByproductRecord, f64> = HashMap::new();
        for b in execute_all_branches(&p).unwrap() {
            *hist.entry(b.byproduct).or_default() += b.probability;
        }
        let first = *hist.values().next().unwrap();
        assert!(hist.values().all(|&w| (w - first).abs() < 1e-12));
        assert!((hist.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correction_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = haar_state(3, &mut rng);
        let b = ByproductRecord {
            x: vec![true, false, true],
            z: vec![true, true, false],
        };
        let back = correct_byproduct(&apply_byproduct(&psi, &b).unwrap(), &b).unwrap();
        assert!(back.equal_up_to_phase(&psi, 1e-12));
        let one = StateVector::basis(1, 1);
        let flip = ByproductRecord { x: vec![true], z: vec![false] };
        assert!(correct_byproduct(&one, &flip)
            .unwrap()
            .equal_up_to_phase(&StateVector::zeros(1), 1e-15));
        assert!(correct_byproduct(&psi, &ByproductRecord::identity(3))
            .unwrap()
            .equal_up_to_phase(&psi, 1e-15));
    }

    #[test]
    fn budget_enforced() {
        let mut c = Circuit::new(1);
        for _ in 0..21 {
            c.push(Gate::H(0)).unwrap();
        }
        let p = compile(&c).unwrap();
        assert!(matches!(execute_all_branches(&p), Err(Error::BranchBudgetExceeded { .. })));
    }
}
