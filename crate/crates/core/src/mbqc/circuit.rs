//! Gate circuits and their lowering to the {J(θ), CZ} gate set.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qcore::gates::{self, Gate, Single};
use crate::qcore::matrix::C64;
use crate::qcore::state::StateVector;
use crate::{Error, Result};

/// What a wire starts in before the first gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireInput {
    /// The wire acts on whatever sits on its input vertex; in a bare pattern
    /// that is |+⟩.
    Open,
    /// The wire starts in |0⟩, realized by an extra leading J(0).
    Zero,
}

/// Lowered operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    J(usize, f64),
    Cz(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    m: usize,
    inputs: Vec<WireInput>,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Width-`m` circuit whose wires take their input from the pattern
    /// (|+⟩ when executed stand-alone).
    pub fn new(m: usize) -> Self {
        Self {
            m,
            inputs: vec![WireInput::Open; m],
            gates: Vec::new(),
        }
    }

    /// Width-`m` circuit acting on |0^m⟩.
    pub fn from_zero(m: usize) -> Self {
        Self {
            m,
            inputs: vec![WireInput::Zero; m],
            gates: Vec::new(),
        }
    }

    pub fn with_inputs(m: usize, inputs: Vec<WireInput>) -> Result<Self> {
        if inputs.len() != m {
            return Err(Error::InvalidCircuit(format!(
                "{} input kinds for {m} wires",
                inputs.len()
            )));
        }
        Ok(Self {
            m,
            inputs,
            gates: Vec::new(),
        })
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        let t = g.targets();
        if let Some(&q) = t.iter().find(|&&q| q >= self.m) {
            return Err(Error::InvalidCircuit(format!(
                "gate target {q} out of range for width {}",
                self.m
            )));
        }
        if t.len() == 2 && t[0] == t[1] {
            return Err(Error::InvalidCircuit("two-qubit gate on a single wire".into()));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn with_gates(mut self, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.m
    }

    pub fn inputs(&self) -> &[WireInput] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of layers when every gate is placed as early as possible.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.m];
        for g in &self.gates {
            let t = g.targets();
            let l = t.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in t {
                level[q] = l;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Lowered J/CZ sequence, including the leading J(0) of `Zero` wires.
    pub fn lowered(&self) -> Vec<Op> {
        let mut ops: Vec<Op> = (0..self.m)
            .filter(|&w| self.inputs[w] == WireInput::Zero)
            .map(|w| Op::J(w, 0.0))
            .collect();
        for g in &self.gates {
            lower_gate(g, &mut ops);
        }
        ops
    }

    /// The state the circuit should produce: its gates applied to |0⟩ on
    /// `Zero` wires and |+⟩ on `Open` wires. Computed from the unlowered gates.
    pub fn ideal_output(&self) -> Result<StateVector> {
        let mut s = StateVector::zeros(self.m);
        for w in 0..self.m {
            if self.inputs[w] == WireInput::Open {
                s.apply_single(w, &gates::H)?;
            }
        }
        for g in &self.gates {
            g.apply(&mut s)?;
        }
        Ok(s)
    }

    /// Applies the gates to an arbitrary input state (wire i = qubit i).
    pub fn apply_to(&self, input: &StateVector) -> Result<StateVector> {
        if input.n_qubits() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: input.n_qubits(),
            });
        }
        let mut s = input.clone();
        for g in &self.gates {
            g.apply(&mut s)?;
        }
        Ok(s)
    }
}

fn rz_ops(q: usize, theta: f64, ops: &mut Vec<Op>) {
    ops.push(Op::J(q, theta));
    ops.push(Op::J(q, 0.0));
}

/// H = J(0); RZ(θ) = J(0)·J(θ); X = J(π)·J(0); Z·X ∝ Y = J(π)·J(π);
/// CX = H_t CZ H_t. Global phases are dropped.
fn lower_gate(g: &Gate, ops: &mut Vec<Op>) {
    match *g {
        Gate::H(q) => ops.push(Op::J(q, 0.0)),
        Gate::J(q, t) => ops.push(Op::J(q, t)),
        Gate::Rz(q, t) => rz_ops(q, t, ops),
        Gate::Z(q) => rz_ops(q, PI, ops),
        Gate::S(q) => rz_ops(q, FRAC_PI_2, ops),
        Gate::T(q) => rz_ops(q, FRAC_PI_4, ops),
        Gate::X(q) => {
            ops.push(Op::J(q, 0.0));
            ops.push(Op::J(q, PI));
        }
        Gate::Y(q) => {
            ops.push(Op::J(q, PI));
            ops.push(Op::J(q, PI));
        }
        Gate::Cz(a, b) => ops.push(Op::Cz(a, b)),
        Gate::Cx(c, t) => {
            ops.push(Op::J(t, 0.0));
            ops.push(Op::Cz(c, t));
            ops.push(Op::J(t, 0.0));
        }
    }
}

/// Lowered sequences of two circuits share a skeleton when they have the
/// same ops on the same wires, differing only in J angles.
pub fn same_skeleton(a: &[Op], b: &[Op]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (Op::J(p, _), Op::J(q, _)) => p == q,
            (Op::Cz(p1, p2), Op::Cz(q1, q2)) => p1 == q1 && p2 == q2,
            _ => false,
        })
}

/// Euler angles (α, β, γ) with U ∝ J(0)·J(α)·J(β)·J(γ) = RZ(α)·(H RZ(β) H)·RZ(γ).
pub fn euler_angles(u: &Single) -> (f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let s = det.sqrt();
    let a = u[0][0] / s;
    let b = u[0][1] / s;
    // SU(2) form: a = cos(β/2) e^{−i(α+γ)/2}, b = −i sin(β/2) e^{−i(α−γ)/2}
    let beta = 2.0 * b.norm().atan2(a.norm());
    let tiny = 1e-12;
    let sum = if a.norm() > tiny { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > tiny {
        -2.0 * b.arg() - PI
    } else {
        0.0
    };
    let (sum, diff) = if a.norm() <= tiny {
        (diff, diff)
    } else if b.norm() <= tiny {
        (sum, sum)
    } else {
        (sum, diff)
    };
    let alpha = 0.5 * (sum + diff);
    let gamma = 0.5 * (sum - diff);
    (alpha, beta, gamma)
}

/// Product J(0)·J(α)·J(β)·J(γ).
pub fn euler_unitary(alpha: f64, beta: f64, gamma: f64) -> Single {
    let mut u = gates::j(gamma);
    for t in [beta, alpha, 0.0] {
        u = gates::mul(&gates::j(t), &u);
    }
    u
}

/// |Tr(U†V)|/2, equal to 1 iff U and V agree up to a global phase.
pub fn phase_free_overlap(u: &Single, v: &Single) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            tr += u[r][c].conj() * v[r][c];
        }
    }
    tr.norm() / 2.0
}

/// Canonical lowering: every maximal run of single-qubit gates on a wire
/// (between CZs, and at the start and end) becomes exactly four J's. Two
/// circuits with the same CZ sequence get the same skeleton.
pub fn canonical_lowering(c: &Circuit) -> Result<Vec<Op>> {
    let mut pending: Vec<Single> = vec![gates::ID; c.width()];
    let mut ops = Vec::new();
    let flush = |w: usize, pending: &mut Vec<Single>, ops: &mut Vec<Op>| -> Result<()> {
        let u = pending[w];
        let (a, b, g) = euler_angles(&u);
        let rebuilt = euler_unitary(a, b, g);
        let overlap = phase_free_overlap(&u, &rebuilt);
        if (overlap - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidCircuit(format!(
                "Euler decomposition failed (overlap {overlap})"
            )));
        }
        for t in [g, b, a, 0.0] {
            ops.push(Op::J(w, t));
        }
        pending[w] = gates::ID;
        Ok(())
    };
    for op in c.lowered() {
        match op {
            Op::J(w, t) => pending[w] = gates::mul(&gates::j(t), &pending[w]),
            Op::Cz(a, b) => {
                flush(a, &mut pending, &mut ops)?;
                flush(b, &mut pending, &mut ops)?;
                ops.push(Op::Cz(a, b));
            }
        }
    }
    for w in 0..c.width() {
        flush(w, &mut pending, &mut ops)?;
    }
    Ok(ops)
}

/// Random lowered circuit: `depth` layers, each either a J with a uniform
/// angle on every wire or a CZ on a random pair (when `m ≥ 2`).
pub fn random_circuit(m: usize, depth: usize, input: WireInput, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::with_inputs(m, vec![input; m]).expect("matching input count");
    for _ in 0..depth {
        if m >= 2 && rng.random_bool(0.4) {
            let a = rng.random_range(0..m);
            let mut b = rng.random_range(0..m - 1);
            if b >= a {
                b += 1;
            }
            c.push(Gate::Cz(a, b)).expect("valid CZ");
        } else {
            for w in 0..m {
                let theta = rng.random_range(-PI..PI);
                c.push(Gate::J(w, theta)).expect("valid J");
            }
        }
    }
    c
}
