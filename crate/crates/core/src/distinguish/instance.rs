//! Problem instances for state and channel distinguishability.

use serde::{Deserialize, Serialize};

use crate::qcore::gates::Gate;
use crate::qcore::{apply_channel, Channel, ChannelSpec, DensityMatrix};
use crate::{Error, Result};

use super::helstrom::trace_distance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
    Unknown,
}

/// Two state-preparation circuits on `m` qubits starting from |0^m⟩. The
/// prepared states ρ₀, ρ₁ live on the first `k` wires; the remaining wires
/// are discarded. Each circuit is stored as a channel with no input and `k`
/// outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct QsdInstance {
    q0: Channel,
    q1: Channel,
    m: usize,
    r: u32,
    pub label: Label,
}

impl QsdInstance {
    pub fn new(q0: Channel, q1: Channel, r: u32, label: Label) -> Result<Self> {
        if q0.n_in() != 0 || q1.n_in() != 0 {
            return Err(Error::InvalidChannel(
                "state preparation circuits take no input".into(),
            ));
        }
        if q0.n_out() != q1.n_out() || q0.n_out() == 0 {
            return Err(Error::InvalidChannel(format!(
                "both circuits need the same positive output count, got {} and {}",
                q0.n_out(),
                q1.n_out()
            )));
        }
        if r < 1 {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        let width = |c: &Channel| c.circuit().map_or(c.n_out(), |circ| circ.wires);
        let m = width(&q0).max(width(&q1));
        Ok(Self { q0, q1, m, r, label })
    }

    /// Instance from two gate lists on `m` wires with `k` output wires.
    pub fn from_gates(m: usize, k: usize, g0: Vec<Gate>, g1: Vec<Gate>, r: u32, label: Label) -> Result<Self> {
        if k > m {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds m = {m}")));
        }
        let q0 = Channel::from_gates_on(m, 0, k, g0)?;
        let q1 = Channel::from_gates_on(m, 0, k, g1)?;
        Self::new(q0, q1, r, label)
    }

    pub fn q(&self, a: u8) -> &Channel {
        if a == 0 {
            &self.q0
        } else {
            &self.q1
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.q0.n_out()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Trace-distance threshold below which the instance is a NO instance.
    pub fn promise_alpha(&self) -> f64 {
        2f64.powi(1 - self.r as i32)
    }

    /// Trace-distance threshold above which the instance is a YES instance.
    pub fn promise_beta(&self) -> f64 {
        1.0 - self.promise_alpha()
    }

    /// ρ_a on the `k` output qubits.
    pub fn output_state(&self, a: u8) -> Result<DensityMatrix> {
        let empty = DensityMatrix::new(crate::qcore::CMatrix::identity(1))?;
        apply_channel(self.q(a), &empty, &[])
    }

    pub fn trace_distance(&self) -> Result<f64> {
        trace_distance(&self.output_state(0)?, &self.output_state(1)?)
    }

    /// Label implied by the promise thresholds.
    pub fn classify(&self) -> Result<Label> {
        let d = self.trace_distance()?;
        Ok(if d >= self.promise_beta() - 1e-12 {
            Label::Yes
        } else if d <= self.promise_alpha() + 1e-12 {
            Label::No
        } else {
            Label::Unknown
        })
    }

    /// ρ₀ = |0⟩⟨0|, ρ₁ = |1⟩⟨1| on a single wire.
    pub fn orthogonal_demo() -> Self {
        Self::from_gates(1, 1, vec![], vec![Gate::X(0)], 3, Label::Yes).expect("valid demo")
    }

    /// Q₀ = Q₁, a two-wire entangling circuit with one output wire.
    pub fn identical_demo() -> Self {
        let gates = vec![Gate::H(0), Gate::H(1), Gate::Cz(0, 1)];
        Self::from_gates(2, 1, gates.clone(), gates, 3, Label::No).expect("valid demo")
    }
}

/// Two channels with `n` input and `m` output qubits, with diamond-distance
/// thresholds `b < a`.
#[derive(Clone, Debug, PartialEq)]
pub struct QcdInstance {
    q0: Channel,
    q1: Channel,
    pub a: f64,
    pub b: f64,
    pub label: Label,
}

impl QcdInstance {
    pub fn new(q0: Channel, q1: Channel, a: f64, b: f64, label: Label) -> Result<Self> {
        if q0.n_in() != q1.n_in() || q0.n_out() != q1.n_out() {
            return Err(Error::InvalidChannel(
                "channels must share input and output sizes".into(),
            ));
        }
        if q0.n_in() == 0 {
            return Err(Error::InvalidChannel("channels need at least one input".into()));
        }
        if !(0.0 <= b && b < a && a <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "thresholds must satisfy 0 <= b < a <= 2, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { q0, q1, a, b, label })
    }

    pub fn q(&self, i: u8) -> &Channel {
        if i == 0 {
            &self.q0
        } else {
            &self.q1
        }
    }

    pub fn n(&self) -> usize {
        self.q0.n_in()
    }

    pub fn m(&self) -> usize {
        self.q0.n_out()
    }

    /// Identity versus X on one qubit; the diamond distance is 2.
    pub fn identity_vs_x_demo() -> Self {
        let q0 = Channel::from_gates(1, 1, vec![]).expect("valid demo");
        let q1 = Channel::from_gates(1, 1, vec![Gate::X(0)]).expect("valid demo");
        Self::new(q0, q1, 1.5, 0.5, Label::Yes).expect("valid demo")
    }

    /// Two copies of the same one-qubit unitary.
    pub fn equal_channels_demo() -> Self {
        let q = Channel::from_gates(1, 1, vec![Gate::H(0), Gate::T(0)]).expect("valid demo");
        Self::new(q.clone(), q, 1.5, 0.5, Label::No).expect("valid demo")
    }
}

/// Either instance kind, serialized with a `protocol` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Instance {
    Qsd(QsdInstance),
    Qcd(QcdInstance),
}

impl Instance {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn label(&self) -> Label {
        match self {
            Instance::Qsd(i) => i.label,
            Instance::Qcd(i) => i.label,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QsdJson {
    r: u32,
    label: Label,
    q0: ChannelSpec,
    q1: ChannelSpec,
}

#[derive(Serialize, Deserialize)]
struct QcdJson {
    a: f64,
    b: f64,
    label: Label,
    q0: ChannelSpec,
    q1: ChannelSpec,
}

impl Serialize for QsdInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QsdJson {
            r: self.r,
            label: self.label,
            q0: ChannelSpec::from(&self.q0),
            q1: ChannelSpec::from(&self.q1),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QsdInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = QsdJson::deserialize(d)?;
        let q0 = Channel::try_from(&raw.q0).map_err(D::Error::custom)?;
        let q1 = Channel::try_from(&raw.q1).map_err(D::Error::custom)?;
        QsdInstance::new(q0, q1, raw.r, raw.label).map_err(D::Error::custom)
    }
}

impl Serialize for QcdInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QcdJson {
            a: self.a,
            b: self.b,
            label: self.label,
            q0: ChannelSpec::from(&self.q0),
            q1: ChannelSpec::from(&self.q1),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QcdInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = QcdJson::deserialize(d)?;
        let q0 = Channel::try_from(&raw.q0).map_err(D::Error::custom)?;
        let q1 = Channel::try_from(&raw.q1).map_err(D::Error::custom)?;
        QcdInstance::new(q0, q1, raw.a, raw.b, raw.label).map_err(D::Error::custom)
    }
}
