//! Prover strategies.
//!
//! A strategy prepares the joint state on every vertex, may act on the qubits
//! it keeps once the black qubits are sent, and answers with one bit after
//! the verifier's classical message.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::setup::{flip_syndrome, ProtocolSetup};
use super::world::ProverDevice;
use crate::qcore::gates;
use crate::qcore::measure::Basis;
use crate::qcore::StateVector;
use crate::{Error, Result};

/// Classical message sent by the verifier in the computation branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierReport {
    /// Byproduct bits of the output box, one per box wire.
    pub x: Vec<bool>,
    pub z: Vec<bool>,
    /// Outcomes of the pattern measurements, in measurement order.
    pub pattern_outcomes: Vec<u8>,
    /// X-basis outcomes of the box and star vertices, one per box wire.
    pub box_outcomes: Vec<u8>,
    pub star_outcomes: Vec<u8>,
}

impl VerifierReport {
    /// Pauli frame X^{x′}Z^{z′} on the white vertex of box wire `i`.
    pub fn white_frame(&self, i: usize) -> (bool, bool) {
        (
            self.x[i] ^ (self.star_outcomes[i] == 1),
            self.z[i] ^ (self.box_outcomes[i] == 1),
        )
    }
}

pub trait ProverStrategy: Send + Sync {
    fn name(&self) -> &str;

    /// Component used for one run when this is a mixture; `None` means the
    /// strategy itself.
    fn pick(&self, _rng: &mut dyn RngCore) -> Option<&dyn ProverStrategy> {
        None
    }

    /// Joint state on all vertices of the protocol graph.
    fn prepare(&self, setup: &ProtocolSetup, rng: &mut dyn RngCore) -> Result<StateVector>;

    /// Runs right after the black qubits are sent; returns classical memory
    /// handed to [`respond`](Self::respond).
    fn after_send(
        &self,
        _setup: &ProtocolSetup,
        _prover: &mut ProverDevice<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Vec<u8>> {
        Ok(Vec::new())
    }

    /// Answer bit in the computation branch.
    fn respond(
        &self,
        setup: &ProtocolSetup,
        report: &VerifierReport,
        memory: &[u8],
        prover: &mut ProverDevice<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8>;
}

/// Undoes the Pauli frame on the whites.
pub fn correct_whites(setup: &ProtocolSetup, report: &VerifierReport, prover: &mut ProverDevice<'_>) -> Result<()> {
    for (i, &w) in setup.layout.whites.iter().enumerate() {
        let (x, z) = report.white_frame(i);
        if x {
            prover.apply_unitary(&[w], &gates::to_matrix(&gates::X))?;
        }
        if z {
            prover.apply_unitary(&[w], &gates::to_matrix(&gates::Z))?;
        }
    }
    Ok(())
}

/// Corrects the whites and applies the Helstrom measurement.
pub fn helstrom_answer(
    setup: &ProtocolSetup,
    report: &VerifierReport,
    prover: &mut ProverDevice<'_>,
    rng: &mut dyn RngCore,
) -> Result<u8> {
    correct_whites(setup, report, prover)?;
    let outcome = prover.measure_povm(&setup.layout.answer_register(), &setup.helstrom, rng)?;
    Ok(outcome as u8)
}

pub struct Honest;

impl ProverStrategy for Honest {
    fn name(&self) -> &str {
        "honest"
    }

    fn prepare(&self, setup: &ProtocolSetup, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(setup.honest_state.clone())
    }

    fn respond(
        &self,
        setup: &ProtocolSetup,
        report: &VerifierReport,
        _memory: &[u8],
        prover: &mut ProverDevice<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8> {
        helstrom_answer(setup, report, prover, rng)
    }
}

/// Honest state with a Z on one uniformly chosen black circle.
pub struct WrongGraph;

impl ProverStrategy for WrongGraph {
    fn name(&self) -> &str {
        "wrong_graph"
    }

    fn prepare(&self, setup: &ProtocolSetup, rng: &mut dyn RngCore) -> Result<StateVector> {
        let circles = &setup.layout.circles;
        let v = circles[rng.random_range(0..circles.len())];
        let mut state = setup.honest_state.clone();
        flip_syndrome(&mut state, v)?;
        Ok(state)
    }

    fn respond(
        &self,
        setup: &ProtocolSetup,
        report: &VerifierReport,
        _memory: &[u8],
        prover: &mut ProverDevice<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8> {
        helstrom_answer(setup, report, prover, rng)
    }
}

/// |+⟩ on every vertex, no entanglement.
pub struct ProductState;

impl ProverStrategy for ProductState {
    fn name(&self) -> &str {
        "product_state"
    }

    fn prepare(&self, setup: &ProtocolSetup, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(StateVector::plus(setup.n_vertices()))
    }

    fn respond(
        &self,
        setup: &ProtocolSetup,
        report: &VerifierReport,
        _memory: &[u8],
        prover: &mut ProverDevice<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8> {
        helstrom_answer(setup, report, prover, rng)
    }
}

/// Honest state, answer always 0.
pub struct BiasedCoin;

impl ProverStrategy for BiasedCoin {
    fn name(&self) -> &str {
        "biased_coin"
    }

    fn prepare(&self, setup: &ProtocolSetup, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(setup.honest_state.clone())
    }

    fn respond(
        &self,
        _setup: &ProtocolSetup,
        _report: &VerifierReport,
        _memory: &[u8],
        _prover: &mut ProverDevice<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8> {
        Ok(0)
    }
}

/// Honest state, but the answer register is measured in the Z basis before
/// any classical message arrives; the answer is the likelier reference given
/// the frame-corrected bits.
pub struct MeasureEarly;

impl ProverStrategy for MeasureEarly {
    fn name(&self) -> &str {
        "measure_early"
    }

    fn prepare(&self, setup: &ProtocolSetup, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(setup.honest_state.clone())
    }

    fn after_send(
        &self,
        setup: &ProtocolSetup,
        prover: &mut ProverDevice<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<u8>> {
        setup
            .layout
            .answer_register()
            .into_iter()
            .map(|v| prover.measure(v, Basis::Z, rng))
            .collect()
    }

    fn respond(
        &self,
        setup: &ProtocolSetup,
        report: &VerifierReport,
        memory: &[u8],
        _prover: &mut ProverDevice<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8> {
        let mut index = 0usize;
        for (i, &bit) in memory.iter().enumerate() {
            let flip = i < setup.layout.whites.len() && report.white_frame(i).0;
            if (bit == 1) ^ flip {
                index |= 1 << i;
            }
        }
        let p0 = setup.references[0].matrix()[(index, index)].re;
        let p1 = setup.references[1].matrix()[(index, index)].re;
        Ok(u8::from(p1 > p0))
    }
}

/// Correct graph state with the Helstrom answer: the best a prover can do
/// once it is forced to hold the ideal state.
pub struct OptimalNoCase;

impl ProverStrategy for OptimalNoCase {
    fn name(&self) -> &str {
        "optimal_no_case"
    }

    fn prepare(&self, setup: &ProtocolSetup, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Ok(setup.honest_state.clone())
    }

    fn respond(
        &self,
        setup: &ProtocolSetup,
        report: &VerifierReport,
        _memory: &[u8],
        prover: &mut ProverDevice<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8> {
        helstrom_answer(setup, report, prover, rng)
    }
}

/// Probabilistic mixture of named strategies, one drawn per run.
pub struct Mixture {
    name: String,
    parts: Vec<(f64, Box<dyn ProverStrategy>)>,
}

impl Mixture {
    pub fn new(name: impl Into<String>, parts: Vec<(f64, Box<dyn ProverStrategy>)>) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.is_empty() || parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "mixture weights must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            parts,
        })
    }

    pub fn choose(&self, rng: &mut dyn RngCore) -> &dyn ProverStrategy {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (w, s) in &self.parts {
            acc += w;
            if u < acc {
                return s.as_ref();
            }
        }
        self.parts.last().expect("nonempty").1.as_ref()
    }
}

impl ProverStrategy for Mixture {
    fn name(&self) -> &str {
        &self.name
    }

    fn pick(&self, rng: &mut dyn RngCore) -> Option<&dyn ProverStrategy> {
        Some(self.choose(rng))
    }

    fn prepare(&self, _setup: &ProtocolSetup, _rng: &mut dyn RngCore) -> Result<StateVector> {
        Err(Error::InvalidParameter("a mixture must be resolved with pick first".into()))
    }

    fn respond(
        &self,
        _setup: &ProtocolSetup,
        _report: &VerifierReport,
        _memory: &[u8],
        _prover: &mut ProverDevice<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8> {
        Err(Error::InvalidParameter("a mixture must be resolved with pick first".into()))
    }
}

pub const STRATEGY_NAMES: [&str; 7] = [
    "honest",
    "wrong_graph",
    "product_state",
    "biased_coin",
    "measure_early",
    "optimal_no_case",
    "mixture",
];

/// Looks up a shipped strategy by name.
pub fn strategy_by_name(name: &str) -> Result<Box<dyn ProverStrategy>> {
    Ok(match name {
        "honest" => Box::new(Honest),
        "wrong_graph" => Box::new(WrongGraph),
        "product_state" => Box::new(ProductState),
        "biased_coin" => Box::new(BiasedCoin),
        "measure_early" => Box::new(MeasureEarly),
        "optimal_no_case" => Box::new(OptimalNoCase),
        "mixture" => Box::new(Mixture::new(
            "mixture",
            vec![
                (0.25, Box::new(WrongGraph) as Box<dyn ProverStrategy>),
                (0.25, Box::new(ProductState)),
                (0.25, Box::new(BiasedCoin)),
                (0.25, Box::new(MeasureEarly)),
            ],
        )?),
        other => {
            return Err(Error::UnknownStrategy {
                name: other.into(),
                available: STRATEGY_NAMES.join(", "),
            })
        }
    })
}

/// Every shipped strategy.
pub fn strategy_library() -> Vec<Box<dyn ProverStrategy>> {
    STRATEGY_NAMES
        .iter()
        .map(|n| strategy_by_name(n).expect("shipped name"))
        .collect()
}
