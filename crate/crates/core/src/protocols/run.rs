//! One run of either protocol.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layout::Protocol;
use super::setup::ProtocolSetup;
use super::strategy::{correct_whites, ProverStrategy, VerifierReport};
use super::world::{LogEntry, Message, Party, World};
use crate::distinguish::{BoundReport, QcdInstance, QsdInstance};
use crate::mbqc::execute::BRANCH_BUDGET;
use crate::qcore::measure::Basis;
use crate::qcore::{DensityMatrix, Pauli};
use crate::stabtest::{s_k_operator, StabTestOutcome};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunBranch {
    Compute,
    Test,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub protocol: Protocol,
    pub strategy: String,
    pub seed: u64,
    pub run_branch: RunBranch,
    /// a (QSD) or i (QCD); computation branch only.
    pub chosen_bit: Option<u8>,
    pub report: Option<VerifierReport>,
    /// a′ or j; computation branch only.
    pub answer_bit: Option<u8>,
    pub test: Option<StabTestOutcome>,
    pub accepted: bool,
    pub messages: Vec<Message>,
    #[serde(skip)]
    pub log: Vec<LogEntry>,
}

fn draw_seed(rng: &mut dyn RngCore) -> u64 {
    rng.next_u64()
}

/// Runs the state distinguishability protocol once. Builds the setup on
/// every call; use [`run_trial`] to reuse one.
pub fn run_qsd(
    inst: &QsdInstance,
    strategy: &dyn ProverStrategy,
    q: f64,
    epsilon: f64,
    bounds: BoundReport,
    rng: &mut dyn RngCore,
) -> Result<ProtocolTranscript> {
    let setup = ProtocolSetup::qsd(inst, q, epsilon, bounds)?;
    run_trial(&setup, strategy, draw_seed(rng))
}

/// Runs the channel distinguishability protocol once.
pub fn run_qcd(
    inst: &QcdInstance,
    strategy: &dyn ProverStrategy,
    q: f64,
    epsilon: f64,
    bounds: BoundReport,
    rng: &mut dyn RngCore,
) -> Result<ProtocolTranscript> {
    let setup = ProtocolSetup::qcd(inst, q, epsilon, bounds)?;
    run_trial(&setup, strategy, draw_seed(rng))
}

/// One run driven entirely by `seed`.
pub fn run_trial(setup: &ProtocolSetup, strategy: &dyn ProverStrategy, seed: u64) -> Result<ProtocolTranscript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng: &mut dyn RngCore = &mut rng;
    let name = strategy.name().to_string();
    let mut strategy = strategy;
    while let Some(inner) = strategy.pick(rng) {
        strategy = inner;
    }
    let layout = &setup.layout;

    // Step 1: the prover prepares |Ψ⟩ and sends the black qubits.
    let state = strategy.prepare(setup, rng)?;
    let mut world = World::new(state, layout.n_vertices())?;
    world.send_quantum(Party::Prover, Party::Verifier, &layout.verifier_held())?;
    let memory = strategy.after_send(setup, &mut world.prover(), rng)?;

    let compute = rng.random::<f64>() < setup.q;
    let mut transcript = ProtocolTranscript {
        protocol: layout.protocol,
        strategy: name,
        seed,
        run_branch: if compute { RunBranch::Compute } else { RunBranch::Test },
        chosen_bit: None,
        report: None,
        answer_bit: None,
        test: None,
        accepted: false,
        messages: Vec::new(),
        log: Vec::new(),
    };
    if compute {
        let a = u8::from(rng.random_bool(0.5));
        let report = compute_measurements(setup, a, &mut world, rng)?;
        world.send_classical(Party::Verifier, Party::Prover, report_bits(&report));
        let answer = strategy.respond(setup, &report, &memory, &mut world.prover(), rng)?;
        if answer > 1 {
            return Err(Error::MalformedProverState(format!("answer {answer} is not a bit")));
        }
        world.send_classical(Party::Prover, Party::Verifier, vec![answer]);
        transcript.chosen_bit = Some(a);
        transcript.report = Some(report);
        transcript.answer_bit = Some(answer);
        transcript.accepted = answer == a;
    } else {
        let outcome = stabilizer_test(setup, &mut world, rng)?;
        transcript.accepted = outcome.passed;
        transcript.test = Some(outcome);
    }
    transcript.messages = world.messages().to_vec();
    transcript.log = world.log().to_vec();
    Ok(transcript)
}

fn report_bits(r: &VerifierReport) -> Vec<u8> {
    r.x.iter()
        .chain(&r.z)
        .map(|&b| u8::from(b))
        .chain(r.pattern_outcomes.iter().copied())
        .chain(r.box_outcomes.iter().copied())
        .chain(r.star_outcomes.iter().copied())
        .collect()
}

/// Steps 2-b to 2-d: the measurement pattern of Q_a, then X measurements of
/// the box and the stars.
fn compute_measurements(
    setup: &ProtocolSetup,
    a: u8,
    world: &mut World,
    rng: &mut dyn RngCore,
) -> Result<VerifierReport> {
    let layout = &setup.layout;
    let pattern = &layout.patterns[a as usize];
    let mut by_vertex = vec![0u8; layout.n_vertices()];
    let mut pattern_outcomes = Vec::with_capacity(pattern.n_measured());
    let mut verifier = world.verifier();
    for m in &pattern.measurements {
        let basis = pattern.basis_for(m, &by_vertex);
        let b = verifier.measure(m.vertex, basis, rng)?;
        by_vertex[m.vertex] = b;
        pattern_outcomes.push(b);
    }
    let byproduct = pattern.byproduct(&by_vertex);
    let nb = layout.output_box.len();
    let box_outcomes = layout
        .output_box
        .iter()
        .map(|&v| verifier.measure(v, Basis::X, rng))
        .collect::<Result<Vec<_>>>()?;
    let star_outcomes = layout
        .stars
        .iter()
        .map(|&v| verifier.measure(v, Basis::X, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifierReport {
        x: byproduct.x[..nb].to_vec(),
        z: byproduct.z[..nb].to_vec(),
        pattern_outcomes,
        box_outcomes,
        star_outcomes,
    })
}

/// Step 3: a uniformly random s_k measured letter by letter.
fn stabilizer_test(setup: &ProtocolSetup, world: &mut World, rng: &mut dyn RngCore) -> Result<StabTestOutcome> {
    let d = &setup.layout.decomposition;
    let k: Vec<bool> = (0..d.n1()).map(|_| rng.random_bool(0.5)).collect();
    let s = s_k_operator(d, &k)?;
    let mut value = s.phase.sign().ok_or(Error::NonHermitianPauli)?;
    let mut verifier = world.verifier();
    for (v, &letter) in s.letters.iter().enumerate() {
        let basis = match letter {
            Pauli::I => continue,
            Pauli::X => Basis::X,
            Pauli::Y => Basis::Y,
            Pauli::Z => Basis::Z,
        };
        if verifier.measure(v, basis, rng)? == 1 {
            value = -value;
        }
    }
    Ok(StabTestOutcome {
        k,
        measured_value: value,
        passed: value == 1,
    })
}

/// One branch of the honest computation, with the corrected state the
/// prover holds on its answer register.
#[derive(Clone, Debug)]
pub struct DeliveredBranch {
    pub probability: f64,
    pub report: VerifierReport,
    pub state: DensityMatrix,
}

/// Enumerates every outcome sequence of the computation branch for the
/// honest prover with choice `a`.
pub fn enumerate_compute_branches(setup: &ProtocolSetup, a: u8) -> Result<Vec<DeliveredBranch>> {
    let layout = &setup.layout;
    let pattern = &layout.patterns[a as usize];
    let steps = pattern.n_measured() + 2 * layout.output_box.len();
    if steps > BRANCH_BUDGET {
        return Err(Error::BranchBudgetExceeded {
            needed: steps,
            budget: BRANCH_BUDGET,
        });
    }
    let mut world = World::new(setup.honest_state.clone(), layout.n_vertices())?;
    world.send_quantum(Party::Prover, Party::Verifier, &layout.verifier_held())?;
    let mut out = Vec::new();
    let by_vertex = vec![0u8; layout.n_vertices()];
    descend(setup, a, world, 0, by_vertex, Vec::new(), 1.0, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    setup: &ProtocolSetup,
    a: u8,
    world: World,
    step: usize,
    by_vertex: Vec<u8>,
    outcomes: Vec<u8>,
    probability: f64,
    out: &mut Vec<DeliveredBranch>,
) -> Result<()> {
    let layout = &setup.layout;
    let pattern = &layout.patterns[a as usize];
    let nm = pattern.n_measured();
    let nb = layout.output_box.len();
    if step == nm + 2 * nb {
        let byproduct = pattern.byproduct(&by_vertex);
        let report = VerifierReport {
            x: byproduct.x[..nb].to_vec(),
            z: byproduct.z[..nb].to_vec(),
            pattern_outcomes: outcomes[..nm].to_vec(),
            box_outcomes: outcomes[nm..nm + nb].to_vec(),
            star_outcomes: outcomes[nm + nb..].to_vec(),
        };
        let mut world = world;
        let mut prover = world.prover();
        correct_whites(setup, &report, &mut prover)?;
        let state = prover.reduced_state(&layout.answer_register())?;
        out.push(DeliveredBranch {
            probability,
            report,
            state,
        });
        return Ok(());
    }
    let (vertex, basis) = if step < nm {
        let m = &pattern.measurements[step];
        (m.vertex, pattern.basis_for(m, &by_vertex))
    } else if step < nm + nb {
        (layout.output_box[step - nm], Basis::X)
    } else {
        (layout.stars[step - nm - nb], Basis::X)
    };
    for b in 0..2u8 {
        let mut next = world.clone();
        let p = match next.verifier().measure_forced(vertex, basis, b) {
            Ok(p) => p,
            Err(Error::ImpossibleOutcome(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut bv = by_vertex.clone();
        bv[vertex] = b;
        let mut oc = outcomes.clone();
        oc.push(b);
        descend(setup, a, next, step + 1, bv, oc, probability * p, out)?;
    }
    Ok(())
}
