//! The shared quantum register with per-vertex ownership.
//!
//! Each live vertex belongs to exactly one party. The verifier reaches the
//! register only through [`VerifierDevice`], whose every request passes
//! [`verifier_capability_guard`]; the prover reaches it through
//! [`ProverDevice`], which may act arbitrarily but only on prover-owned
//! vertices.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::qcore::measure::{project_outcome, Basis};
use crate::qcore::{CMatrix, DensityMatrix, Povm, StateVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Prover,
    Verifier,
}

/// A request to operate on the register.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Measure { vertex: usize, basis: Basis },
    Unitary { vertices: Vec<usize>, matrix: CMatrix },
    Povm { vertices: Vec<usize>, povm: Povm },
}

impl Action {
    pub fn vertices(&self) -> Vec<usize> {
        match self {
            Action::Measure { vertex, .. } => vec![*vertex],
            Action::Unitary { vertices, .. } | Action::Povm { vertices, .. } => vertices.clone(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Action::Measure { .. } => "measure",
            Action::Unitary { .. } => "unitary",
            Action::Povm { .. } => "povm",
        }
    }
}

/// Admits only single-qubit measurements in the Z, X, Y or XY-plane bases.
pub fn verifier_capability_guard(action: &Action) -> Result<()> {
    match action {
        Action::Measure { .. } => Ok(()),
        other => Err(Error::CapabilityViolation(format!(
            "{} on {} qubit(s) requested",
            other.kind(),
            other.vertices().len()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub party: Party,
    pub kind: String,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Message {
    Quantum { from: Party, to: Party, vertices: Vec<usize> },
    Classical { from: Party, to: Party, bits: Vec<u8> },
}

#[derive(Clone, Debug)]
pub struct World {
    state: StateVector,
    position: Vec<Option<usize>>,
    live: Vec<usize>,
    owner: Vec<Party>,
    log: Vec<LogEntry>,
    messages: Vec<Message>,
    finished: bool,
}

impl World {
    /// Register holding `state` with vertex `i` on qubit `i`, all owned by
    /// the prover who prepared it.
    pub fn new(state: StateVector, n_vertices: usize) -> Result<Self> {
        if state.n_qubits() != n_vertices {
            return Err(Error::MalformedProverState(format!(
                "state has {} qubits, the graph has {n_vertices} vertices",
                state.n_qubits()
            )));
        }
        if !state.is_normalized() {
            return Err(Error::MalformedProverState("state is not normalized".into()));
        }
        Ok(Self {
            state,
            position: (0..n_vertices).map(Some).collect(),
            live: (0..n_vertices).collect(),
            owner: vec![Party::Prover; n_vertices],
            log: Vec::new(),
            messages: Vec::new(),
            finished: false,
        })
    }

    /// Current owner, `None` once the vertex has been measured.
    pub fn owner(&self, v: usize) -> Option<Party> {
        self.position.get(v).copied().flatten().map(|_| self.owner[v])
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn live_vertices(&self) -> &[usize] {
        &self.live
    }

    /// Hands `vertices` from one party to the other as one quantum message.
    pub fn send_quantum(&mut self, from: Party, to: Party, vertices: &[usize]) -> Result<()> {
        self.check_owned(from, vertices)?;
        for &v in vertices {
            self.owner[v] = to;
        }
        self.messages.push(Message::Quantum {
            from,
            to,
            vertices: vertices.to_vec(),
        });
        Ok(())
    }

    pub fn send_classical(&mut self, from: Party, to: Party, bits: Vec<u8>) {
        self.messages.push(Message::Classical { from, to, bits });
    }

    pub fn verifier(&mut self) -> VerifierDevice<'_> {
        VerifierDevice { world: self }
    }

    pub fn prover(&mut self) -> ProverDevice<'_> {
        ProverDevice { world: self }
    }

    fn check_owned(&self, party: Party, vertices: &[usize]) -> Result<()> {
        if self.finished {
            return Err(Error::OwnershipViolation("register already consumed".into()));
        }
        for (i, &v) in vertices.iter().enumerate() {
            match self.owner(v) {
                Some(p) if p == party => {}
                Some(p) => {
                    return Err(Error::OwnershipViolation(format!(
                        "{party:?} touched vertex {v} owned by {p:?}"
                    )))
                }
                None => {
                    return Err(Error::OwnershipViolation(format!(
                        "vertex {v} is not in the register"
                    )))
                }
            }
            if vertices[..i].contains(&v) {
                return Err(Error::OwnershipViolation(format!("vertex {v} listed twice")));
            }
        }
        Ok(())
    }

    fn positions(&self, vertices: &[usize]) -> Vec<usize> {
        vertices.iter().map(|&v| self.position[v].expect("live")).collect()
    }

    fn record(&mut self, party: Party, action: &Action) {
        self.log.push(LogEntry {
            party,
            kind: action.kind().into(),
            vertices: action.vertices(),
        });
    }

    fn remove(&mut self, v: usize, post: StateVector) {
        let q = self.position[v].take().expect("live");
        self.live.remove(q);
        for (i, &u) in self.live.iter().enumerate().skip(q) {
            self.position[u] = Some(i);
        }
        self.state = post;
    }

    /// Single-qubit projective measurement; `pick` maps the probability of
    /// outcome 0 to the outcome. Returns the outcome and its probability.
    fn measure(
        &mut self,
        party: Party,
        vertex: usize,
        basis: Basis,
        pick: impl FnOnce(f64) -> u8,
    ) -> Result<(u8, f64)> {
        self.check_owned(party, &[vertex])?;
        let action = Action::Measure { vertex, basis };
        self.record(party, &action);
        let q = self.position[vertex].expect("live");
        let p0 = match project_outcome(&self.state, q, basis, 0) {
            Ok((p, _)) => p,
            Err(Error::ImpossibleOutcome(p)) => p,
            Err(e) => return Err(e),
        };
        let outcome = pick(p0);
        let (p, post) = project_outcome(&self.state, q, basis, outcome)?;
        self.remove(vertex, post);
        Ok((outcome, p))
    }

    fn apply_unitary(&mut self, party: Party, vertices: &[usize], u: &CMatrix) -> Result<()> {
        self.check_owned(party, vertices)?;
        let d = 1usize << vertices.len();
        if u.rows() != d || !u.is_square() || u.unitarity_defect() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "expected a {d}x{d} unitary"
            )));
        }
        let action = Action::Unitary {
            vertices: vertices.to_vec(),
            matrix: u.clone(),
        };
        self.record(party, &action);
        let q = self.positions(vertices);
        self.state.apply_matrix(&q, u)
    }

    fn reduced_state(&self, vertices: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::reduced_from_pure(&self.state, &self.positions(vertices))
    }

    /// Destructive POVM measurement; the register cannot be used afterwards.
    fn measure_povm(
        &mut self,
        party: Party,
        vertices: &[usize],
        povm: &Povm,
        rng: &mut dyn RngCore,
    ) -> Result<usize> {
        self.check_owned(party, vertices)?;
        if povm.dim() != 1 << vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << vertices.len(),
                found: povm.dim(),
            });
        }
        let rho = self.reduced_state(vertices)?;
        let action = Action::Povm {
            vertices: vertices.to_vec(),
            povm: povm.clone(),
        };
        self.record(party, &action);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let last = povm.elements().len() - 1;
        let mut outcome = last;
        for i in 0..last {
            acc += povm.probability(i, &rho);
            if u < acc {
                outcome = i;
                break;
            }
        }
        self.finished = true;
        Ok(outcome)
    }
}

/// The verifier's only handle on the register.
pub struct VerifierDevice<'a> {
    world: &'a mut World,
}

impl VerifierDevice<'_> {
    /// Executes a request after the capability guard and ownership checks.
    pub fn submit(&mut self, action: Action, rng: &mut dyn RngCore) -> Result<u8> {
        verifier_capability_guard(&action)?;
        match action {
            Action::Measure { vertex, basis } => {
                let pick = |p0: f64| u8::from(rng.random::<f64>() >= p0);
                Ok(self.world.measure(Party::Verifier, vertex, basis, pick)?.0)
            }
            _ => unreachable!("rejected by the guard"),
        }
    }

    pub fn measure(&mut self, vertex: usize, basis: Basis, rng: &mut dyn RngCore) -> Result<u8> {
        self.submit(Action::Measure { vertex, basis }, rng)
    }

    /// Measurement post-selected on `outcome`; returns its probability.
    pub(crate) fn measure_forced(&mut self, vertex: usize, basis: Basis, outcome: u8) -> Result<f64> {
        let action = Action::Measure { vertex, basis };
        verifier_capability_guard(&action)?;
        Ok(self.world.measure(Party::Verifier, vertex, basis, |_| outcome)?.1)
    }
}

/// The prover's handle: unrestricted operations on prover-owned vertices.
pub struct ProverDevice<'a> {
    world: &'a mut World,
}

impl ProverDevice<'_> {
    pub fn apply_unitary(&mut self, vertices: &[usize], u: &CMatrix) -> Result<()> {
        self.world.apply_unitary(Party::Prover, vertices, u)
    }

    pub fn measure(&mut self, vertex: usize, basis: Basis, rng: &mut dyn RngCore) -> Result<u8> {
        let pick = |p0: f64| u8::from(rng.random::<f64>() >= p0);
        Ok(self.world.measure(Party::Prover, vertex, basis, pick)?.0)
    }

    pub fn measure_povm(&mut self, vertices: &[usize], povm: &Povm, rng: &mut dyn RngCore) -> Result<usize> {
        self.world.measure_povm(Party::Prover, vertices, povm, rng)
    }

    /// Reduced state of prover-owned vertices, for analysis by an unbounded
    /// prover.
    pub fn reduced_state(&self, vertices: &[usize]) -> Result<DensityMatrix> {
        self.world.check_owned(Party::Prover, vertices)?;
        self.world.reduced_state(vertices)
    }

    /// Vertices still held by the prover.
    pub fn held(&self) -> Vec<usize> {
        self.world
            .live
            .iter()
            .copied()
            .filter(|&v| self.world.owner[v] == Party::Prover)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates::Gate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn world() -> World {
        let mut w = World::new(StateVector::plus(3), 3).unwrap();
        w.send_quantum(Party::Prover, Party::Verifier, &[0, 1]).unwrap();
        w
    }

    #[test]
    fn guard_admits_only_single_qubit_measurements() {
        assert!(verifier_capability_guard(&Action::Measure {
            vertex: 0,
            basis: Basis::XyPlane(0.3)
        })
        .is_ok());
        let cz = crate::qcore::gates::circuit_unitary(2, &[Gate::Cz(0, 1)]).unwrap();
        let err = verifier_capability_guard(&Action::Unitary {
            vertices: vec![0, 1],
            matrix: cz,
        })
        .unwrap_err();
        assert!(matches!(err, Error::CapabilityViolation(_)));
    }

    #[test]
    fn verifier_two_qubit_request_is_rejected() {
        let mut w = world();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = w
            .verifier()
            .submit(
                Action::Unitary {
                    vertices: vec![0, 1],
                    matrix: CMatrix::identity(4),
                },
                &mut rng,
            )
            .unwrap_err();
        assert!(matches!(err, Error::CapabilityViolation(_)));
        assert!(w.log().is_empty());
    }

    #[test]
    fn ownership_is_enforced() {
        let mut w = world();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            w.verifier().measure(2, Basis::X, &mut rng),
            Err(Error::OwnershipViolation(_))
        ));
        assert!(matches!(
            w.prover().apply_unitary(&[0], &CMatrix::identity(2)),
            Err(Error::OwnershipViolation(_))
        ));
        assert_eq!(w.verifier().measure(0, Basis::X, &mut rng).unwrap(), 0);
        assert_eq!(w.owner(0), None);
        assert!(w.verifier().measure(0, Basis::X, &mut rng).is_err());
        assert_eq!(w.prover().held(), vec![2]);
    }

    #[test]
    fn prover_may_apply_large_unitaries_on_its_register() {
        let mut w = World::new(StateVector::zeros(6), 6).unwrap();
        w.send_quantum(Party::Prover, Party::Verifier, &[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = crate::qcore::random::random_unitary(32, &mut rng);
        w.prover().apply_unitary(&[1, 2, 3, 4, 5], &u).unwrap();
        let rho = w.prover().reduced_state(&[1, 2, 3, 4, 5]).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn malformed_state_is_rejected() {
        assert!(matches!(
            World::new(StateVector::plus(2), 3),
            Err(Error::MalformedProverState(_))
        ));
    }
}
