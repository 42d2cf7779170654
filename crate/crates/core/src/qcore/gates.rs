//! Gate set shared by channel construction and the pattern compiler.
//!
//! Phase-rotation convention: `RZ(θ) = diag(1, e^{iθ})`, so `S = RZ(π/2)`,
//! `T = RZ(π/4)` and `Z = RZ(π)` exactly. `J(θ) = H·RZ(θ)`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::state::StateVector;
use crate::{Error, Result};

pub type Single = [[C64; 2]; 2];

const R: C64 = C64::new(FRAC_1_SQRT_2, 0.0);

pub const ID: Single = [[ONE, ZERO], [ZERO, ONE]];
pub const H: Single = [[R, R], [R, C64::new(-FRAC_1_SQRT_2, 0.0)]];
pub const X: Single = [[ZERO, ONE], [ONE, ZERO]];
pub const Y: Single = [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]];
pub const Z: Single = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];
pub const S: Single = [[ONE, ZERO], [ZERO, C64::new(0.0, 1.0)]];
pub const T: Single = [[ONE, ZERO], [ZERO, C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]];

pub fn rz(theta: f64) -> Single {
    [[ONE, ZERO], [ZERO, C64::from_polar(1.0, theta)]]
}

/// J(θ) = H·RZ(θ)
pub fn j(theta: f64) -> Single {
    let e = C64::from_polar(FRAC_1_SQRT_2, theta);
    [[R, e], [R, -e]]
}

pub fn to_matrix(u: &Single) -> CMatrix {
    CMatrix::from_rows(&[u[0].to_vec(), u[1].to_vec()])
}

pub fn mul(a: &Single, b: &Single) -> Single {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, slot) in row.iter_mut().enumerate() {
            *slot = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// A gate acting on named wires.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    T(usize),
    Rz(usize, f64),
    J(usize, f64),
    Cz(usize, usize),
    Cx(usize, usize),
}

impl Gate {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::S(q)
            | Gate::T(q)
            | Gate::Rz(q, _)
            | Gate::J(q, _) => vec![q],
            Gate::Cz(a, b) | Gate::Cx(a, b) => vec![a, b],
        }
    }

    /// The 2×2 matrix of a single-qubit gate.
    pub fn single_matrix(&self) -> Option<Single> {
        Some(match *self {
            Gate::H(_) => H,
            Gate::X(_) => X,
            Gate::Y(_) => Y,
            Gate::Z(_) => Z,
            Gate::S(_) => S,
            Gate::T(_) => T,
            Gate::Rz(_, t) => rz(t),
            Gate::J(_, t) => j(t),
            Gate::Cz(..) | Gate::Cx(..) => return None,
        })
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match *self {
            Gate::Cz(a, b) => state.apply_cz(a, b),
            Gate::Cx(c, t) => state.apply_cx(c, t),
            _ => {
                let u = self.single_matrix().expect("single-qubit gate");
                state.apply_single(self.targets()[0], &u)
            }
        }
    }
}

/// Unitary of a gate sequence on `wires` qubits.
pub fn circuit_unitary(wires: usize, gates: &[Gate]) -> Result<CMatrix> {
    let dim = 1usize << wires;
    let mut u = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::basis(wires, col);
        for g in gates {
            g.apply(&mut s)?;
        }
        for (row, a) in s.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// Wire-format gate: `{"name": "RZ", "targets": [0], "angle": 0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub name: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl TryFrom<&GateSpec> for Gate {
    type Error = Error;

    fn try_from(spec: &GateSpec) -> Result<Gate> {
        let one = |t: &[usize]| -> Result<usize> {
            match t {
                [q] => Ok(*q),
                _ => Err(Error::InvalidChannel(format!(
                    "gate {} expects one target, got {}",
                    spec.name,
                    t.len()
                ))),
            }
        };
        let two = |t: &[usize]| -> Result<(usize, usize)> {
            match t {
                [a, b] if a != b => Ok((*a, *b)),
                _ => Err(Error::InvalidChannel(format!(
                    "gate {} expects two distinct targets",
                    spec.name
                ))),
            }
        };
        let angle = || {
            spec.angle
                .ok_or_else(|| Error::InvalidChannel(format!("gate {} requires an angle", spec.name)))
        };
        let t = &spec.targets;
        Ok(match spec.name.to_ascii_uppercase().as_str() {
            "H" => Gate::H(one(t)?),
            "X" => Gate::X(one(t)?),
            "Y" => Gate::Y(one(t)?),
            "Z" => Gate::Z(one(t)?),
            "S" => Gate::S(one(t)?),
            "T" => Gate::T(one(t)?),
            "RZ" => Gate::Rz(one(t)?, angle()?),
            "J" => Gate::J(one(t)?, angle()?),
            "CZ" => {
                let (a, b) = two(t)?;
                Gate::Cz(a, b)
            }
            "CX" | "CNOT" => {
                let (a, b) = two(t)?;
                Gate::Cx(a, b)
            }
            other => return Err(Error::InvalidChannel(format!("unknown gate `{other}`"))),
        })
    }
}

impl From<&Gate> for GateSpec {
    fn from(g: &Gate) -> GateSpec {
        let (name, angle) = match *g {
            Gate::H(_) => ("H", None),
            Gate::X(_) => ("X", None),
            Gate::Y(_) => ("Y", None),
            Gate::Z(_) => ("Z", None),
            Gate::S(_) => ("S", None),
            Gate::T(_) => ("T", None),
            Gate::Rz(_, t) => ("RZ", Some(t)),
            Gate::J(_, t) => ("J", Some(t)),
            Gate::Cz(..) => ("CZ", None),
            Gate::Cx(..) => ("CX", None),
        };
        GateSpec {
            name: name.to_string(),
            targets: g.targets(),
            angle,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &Single, b: &Single) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn named_phases_are_rz() {
        assert!(close(&S, &rz(PI / 2.0)));
        assert!(close(&T, &rz(PI / 4.0)));
        assert!(close(&Z, &rz(PI)));
    }

    #[test]
    fn j_zero_is_hadamard() {
        assert!(close(&j(0.0), &H));
        assert!(close(&j(0.7), &mul(&H, &rz(0.7))));
    }

    #[test]
    fn spec_round_trip() {
        let g = Gate::Rz(2, 0.25);
        let spec = GateSpec::from(&g);
        assert_eq!(Gate::try_from(&spec).unwrap(), g);
        let bad = GateSpec {
            name: "CZ".into(),
            targets: vec![1, 1],
            angle: None,
        };
        assert!(Gate::try_from(&bad).is_err());
    }

    #[test]
    fn cx_unitary() {
        let u = circuit_unitary(2, &[Gate::Cx(0, 1)]).unwrap();
        // control qubit 0 set (index 1) maps to index 3
        assert_eq!(u[(3, 1)], ONE);
        assert_eq!(u[(1, 3)], ONE);
        assert_eq!(u[(0, 0)], ONE);
    }
}
