//! Quantum channels in Kraus form.

use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::gates::{circuit_unitary, Gate, GateSpec};
use super::matrix::{CMatrix, C64, ZERO};
use super::state::{complement, deposit_bits};
use crate::{Error, Result};

pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Trace-preserving map from `n_in` to `n_out` qubits. When built from a gate
/// list the circuit is retained so it can be compiled to a pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    n_in: usize,
    n_out: usize,
    kraus: Vec<CMatrix>,
    circuit: Option<Circuit>,
}

/// Gate-level description of a channel: inputs on wires `0..n_in`, ancillas
/// in |0⟩ on the remaining wires, outputs are wires `0..n_out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub wires: usize,
    pub gates: Vec<Gate>,
}

impl Channel {
    pub fn new(n_in: usize, n_out: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus list".into()));
        }
        let (rows, cols) = (1usize << n_out, 1usize << n_in);
        for k in &kraus {
            if k.rows() != rows || k.cols() != cols {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator is {}x{}, expected {rows}x{cols}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut sum = CMatrix::zeros(cols, cols);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let defect = sum.max_abs_diff(&CMatrix::identity(cols));
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not trace preserving (defect {defect:e})"
            )));
        }
        Ok(Self {
            n_in,
            n_out,
            kraus,
            circuit: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_in: n,
            n_out: n,
            kraus: vec![CMatrix::identity(1 << n)],
            circuit: Some(Circuit {
                wires: n,
                gates: Vec::new(),
            }),
        }
    }

    pub fn from_unitary(n: usize, u: CMatrix) -> Result<Self> {
        let defect = u.unitarity_defect();
        if u.rows() != 1 << n || !u.is_square() || defect > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "not a {n}-qubit unitary (defect {defect:e})"
            )));
        }
        Self::new(n, n, vec![u])
    }

    /// Channel of a gate circuit. The circuit width is the largest of `n_in`,
    /// `n_out` and the highest target + 1; extra wires start in |0⟩ and wires
    /// `n_out..` are traced out at the end.
    pub fn from_gates(n_in: usize, n_out: usize, gates: Vec<Gate>) -> Result<Self> {
        Self::from_gates_on(0, n_in, n_out, gates)
    }

    /// As [`from_gates`](Self::from_gates) with at least `min_wires` wires.
    pub fn from_gates_on(min_wires: usize, n_in: usize, n_out: usize, gates: Vec<Gate>) -> Result<Self> {
        let max_target = gates
            .iter()
            .flat_map(|g| g.targets())
            .max()
            .map_or(0, |t| t + 1);
        let wires = min_wires.max(n_in).max(n_out).max(max_target);
        if wires > 14 {
            return Err(Error::DenseBudgetExceeded {
                needed: wires,
                limit: 14,
            });
        }
        let u = circuit_unitary(wires, &gates)?;
        let kraus = stinespring_kraus(&u, wires, n_in, n_out);
        let mut c = Self::new(n_in, n_out, kraus)?;
        c.circuit = Some(Circuit { wires, gates });
        Ok(c)
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn circuit(&self) -> Option<&Circuit> {
        self.circuit.as_ref()
    }

    /// The single Kraus operator when the channel is unitary.
    pub fn as_unitary(&self) -> Option<&CMatrix> {
        match self.kraus.as_slice() {
            [u] if self.n_in == self.n_out => Some(u),
            _ => None,
        }
    }
}

/// K_t = (⟨t| on wires n_out..) U (· ⊗ |0⟩ on wires n_in..).
fn stinespring_kraus(u: &CMatrix, wires: usize, n_in: usize, n_out: usize) -> Vec<CMatrix> {
    let (d_in, d_out) = (1usize << n_in, 1usize << n_out);
    let env = 1usize << (wires - n_out);
    (0..env)
        .map(|t| {
            let mut k = CMatrix::zeros(d_out, d_in);
            for a in 0..d_out {
                for b in 0..d_in {
                    k[(a, b)] = u[(a | (t << n_out), b)];
                }
            }
            k
        })
        .filter(|k| k.max_abs() > 1e-15)
        .collect()
}

/// Σ (I ⊗ K) ρ (I ⊗ K)† with the Kraus operators acting on the low block.
/// `rho` has dimension `d_rest * k.cols()`.
fn apply_low(kraus: &[CMatrix], rho: &CMatrix, adjoint: bool) -> CMatrix {
    let (d_out, d_in) = if adjoint {
        (kraus[0].cols(), kraus[0].rows())
    } else {
        (kraus[0].rows(), kraus[0].cols())
    };
    let d_rest = rho.rows() / d_in;
    let mut out = CMatrix::zeros(d_rest * d_out, d_rest * d_out);
    let mut tmp = CMatrix::zeros(d_rest * d_out, d_rest * d_in);
    for k in kraus {
        let kk = if adjoint { k.adjoint() } else { k.clone() };
        // tmp = (I⊗K) ρ
        for r1 in 0..d_rest {
            for a in 0..d_out {
                let row = r1 * d_out + a;
                for col in 0..d_rest * d_in {
                    let mut acc = ZERO;
                    for i in 0..d_in {
                        acc += kk[(a, i)] * rho[(r1 * d_in + i, col)];
                    }
                    tmp[(row, col)] = acc;
                }
            }
        }
        // out += tmp (I⊗K)†
        for row in 0..d_rest * d_out {
            for r2 in 0..d_rest {
                for b in 0..d_out {
                    let mut acc = ZERO;
                    for j in 0..d_in {
                        acc += tmp[(row, r2 * d_in + j)] * kk[(b, j)].conj();
                    }
                    out[(row, r2 * d_out + b)] += acc;
                }
            }
        }
    }
    out
}

fn move_targets_low(n: usize, target: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; n];
    for &t in target {
        if t >= n {
            return Err(Error::QubitOutOfRange {
                index: t,
                n_qubits: n,
            });
        }
        if seen[t] {
            return Err(Error::InvalidParameter(format!("repeated target qubit {t}")));
        }
        seen[t] = true;
    }
    let mut order = target.to_vec();
    order.extend(complement(n, target));
    Ok(order)
}

fn permute(m: &CMatrix, order: &[usize]) -> CMatrix {
    let dim = m.rows();
    let map: Vec<usize> = (0..dim).map(|i| deposit_bits(i, order)).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = m[(map[r], map[c])];
        }
    }
    out
}

fn inverse_permutation(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (i, &o) in order.iter().enumerate() {
        inv[o] = i;
    }
    inv
}

/// Applies `c` to the qubits `target` of `rho` (`target[i]` is the channel's
/// input qubit i). With `n_in == n_out` the qubits stay in place; otherwise
/// the result holds the channel outputs on its lowest `n_out` qubits followed
/// by the untouched qubits in ascending order.
pub fn apply_channel(c: &Channel, rho: &DensityMatrix, target: &[usize]) -> Result<DensityMatrix> {
    if target.len() != c.n_in {
        return Err(Error::DimensionMismatch {
            expected: c.n_in,
            found: target.len(),
        });
    }
    let n = rho.n_qubits();
    let order = move_targets_low(n, target)?;
    let low = permute(rho.matrix(), &order);
    let out = apply_low(&c.kraus, &low, false);
    let n_new = n - c.n_in + c.n_out;
    let out = if c.n_in == c.n_out {
        permute(&out, &inverse_permutation(&order))
    } else {
        out
    };
    Ok(DensityMatrix::from_matrix_unchecked(n_new, out))
}

/// Heisenberg-picture map Σ K† M K on an operator whose lowest `n_out`
/// qubits are the channel output; the result has the input on its lowest
/// `n_in` qubits.
pub fn apply_adjoint_low(c: &Channel, m: &CMatrix) -> Result<CMatrix> {
    if !m.rows().is_multiple_of(1 << c.n_out) || !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: 1 << c.n_out,
            found: m.rows(),
        });
    }
    Ok(apply_low(&c.kraus, m, true))
}

/// Σ K ρ K† on an operator whose lowest `n_in` qubits are the channel input.
pub fn apply_low_block(c: &Channel, m: &CMatrix) -> Result<CMatrix> {
    if !m.rows().is_multiple_of(1 << c.n_in) || !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: 1 << c.n_in,
            found: m.rows(),
        });
    }
    Ok(apply_low(&c.kraus, m, false))
}

/// Wire format, either a gate list or explicit Kraus operators given as
/// nested `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Gates {
        n_in: usize,
        n_out: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wires: Option<usize>,
        gates: Vec<GateSpec>,
    },
    Kraus {
        n_in: usize,
        n_out: usize,
        kraus: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

impl TryFrom<&ChannelSpec> for Channel {
    type Error = Error;

    fn try_from(spec: &ChannelSpec) -> Result<Channel> {
        match spec {
            ChannelSpec::Gates {
                n_in,
                n_out,
                wires,
                gates,
            } => {
                let gates = gates.iter().map(Gate::try_from).collect::<Result<Vec<_>>>()?;
                Channel::from_gates_on(wires.unwrap_or(0), *n_in, *n_out, gates)
            }
            ChannelSpec::Kraus { n_in, n_out, kraus } => {
                let mats = kraus
                    .iter()
                    .map(|rows| {
                        let rows: Vec<Vec<C64>> = rows
                            .iter()
                            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
                            .collect();
                        if rows.iter().any(|r| r.len() != rows[0].len()) {
                            return Err(Error::InvalidChannel("ragged Kraus matrix".into()));
                        }
                        Ok(CMatrix::from_rows(&rows))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Channel::new(*n_in, *n_out, mats)
            }
        }
    }
}

impl From<&Channel> for ChannelSpec {
    fn from(c: &Channel) -> ChannelSpec {
        match &c.circuit {
            Some(circ) => ChannelSpec::Gates {
                n_in: c.n_in,
                n_out: c.n_out,
                wires: (circ.wires > c.n_in.max(c.n_out)).then_some(circ.wires),
                gates: circ.gates.iter().map(GateSpec::from).collect(),
            },
            None => ChannelSpec::Kraus {
                n_in: c.n_in,
                n_out: c.n_out,
                kraus: c
                    .kraus
                    .iter()
                    .map(|k| {
                        (0..k.rows())
                            .map(|r| k.row(r).iter().map(|z| [z.re, z.im]).collect())
                            .collect()
                    })
                    .collect(),
            },
        }
    }
}
