//! Measurement patterns and the circuit-to-pattern compiler.
//!
//! Every J(θ) on a wire adds one vertex to that wire's line and schedules the
//! previous vertex for measurement; a CZ adds an edge between the current
//! vertices of its two wires. Byproducts are tracked per wire as the sets of
//! measured vertices whose outcome parity gives the pending X and Z.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::circuit::{canonical_lowering, same_skeleton, Circuit, Op};
use crate::graphstate::Graph;
use crate::qcore::measure::Basis;
use crate::qcore::pauli::{Pauli, PauliString};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub vertex: usize,
    /// Base angle θ of the J(θ) this measurement implements.
    pub angle: f64,
    /// Parity of these outcomes flips the sign of θ.
    pub x_deps: Vec<usize>,
    /// Parity of these outcomes adds π.
    pub z_deps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPattern {
    pub graph: Graph,
    /// Input vertex of each wire.
    pub input_vertices: Vec<usize>,
    /// Output vertex of each wire (V_o).
    pub output_vertices: Vec<usize>,
    pub measurements: Vec<Measurement>,
    /// Per output wire, the outcomes whose parity gives x_j and z_j.
    pub output_x_deps: Vec<Vec<usize>>,
    pub output_z_deps: Vec<Vec<usize>>,
}

/// x, z bits of the output byproduct B = ⊗_j X_j^{x_j} Z_j^{z_j}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ByproductRecord {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl ByproductRecord {
    pub fn identity(m: usize) -> Self {
        Self {
            x: vec![false; m],
            z: vec![false; m],
        }
    }

    pub fn width(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&b| !b)
    }

    /// Letters of X^x Z^z, ignoring the phase i for Y = iXZ.
    pub fn letters(&self) -> Vec<Pauli> {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| Pauli::from_bits(x, z))
            .collect()
    }

    pub fn to_pauli(&self) -> PauliString {
        PauliString {
            letters: self.letters(),
            phase: Default::default(),
        }
    }
}

fn parity(deps: &[usize], outcomes: &[u8]) -> bool {
    deps.iter().fold(0u8, |acc, &v| acc ^ outcomes[v]) & 1 == 1
}

impl MeasurementPattern {
    pub fn width(&self) -> usize {
        self.output_vertices.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn n_measured(&self) -> usize {
        self.measurements.len()
    }

    /// θ′ = (−1)^{s_x}θ + s_z·π for the given outcomes (indexed by vertex).
    pub fn adapted_angle(&self, m: &Measurement, outcomes: &[u8]) -> f64 {
        let sx = parity(&m.x_deps, outcomes);
        let sz = parity(&m.z_deps, outcomes);
        let theta = if sx { -m.angle } else { m.angle };
        if sz {
            theta + PI
        } else {
            theta
        }
    }

    /// Measurement basis (|0⟩ ± e^{−iθ′}|1⟩)/√2; outcome b leaves X^b J(θ′)
    /// on the next vertex.
    pub fn basis_for(&self, m: &Measurement, outcomes: &[u8]) -> Basis {
        Basis::XyPlane(-self.adapted_angle(m, outcomes))
    }

    pub fn byproduct(&self, outcomes: &[u8]) -> ByproductRecord {
        ByproductRecord {
            x: self.output_x_deps.iter().map(|d| parity(d, outcomes)).collect(),
            z: self.output_z_deps.iter().map(|d| parity(d, outcomes)).collect(),
        }
    }

    /// Checks coverage of V − V_o and that dependencies point backwards.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_vertices();
        let mut role = vec![0u8; n];
        for &v in &self.output_vertices {
            if v >= n || role[v] != 0 {
                return Err(Error::InvalidPattern(format!("bad output vertex {v}")));
            }
            role[v] = 1;
        }
        if self.input_vertices.len() != self.output_vertices.len()
            || self.output_x_deps.len() != self.width()
            || self.output_z_deps.len() != self.width()
        {
            return Err(Error::InvalidPattern("wire count mismatch".into()));
        }
        for m in &self.measurements {
            let v = m.vertex;
            if v >= n || role[v] != 0 {
                return Err(Error::InvalidPattern(format!("vertex {v} measured twice or is an output")));
            }
            for &d in m.x_deps.iter().chain(&m.z_deps) {
                if d >= n || role[d] != 2 {
                    return Err(Error::InvalidPattern(format!(
                        "vertex {v} depends on {d}, which is not measured earlier"
                    )));
                }
            }
            role[v] = 2;
        }
        if let Some(v) = role.iter().position(|&r| r == 0) {
            return Err(Error::InvalidPattern(format!("vertex {v} is neither measured nor output")));
        }
        for &d in self.output_x_deps.iter().chain(&self.output_z_deps).flatten() {
            if d >= n || role[d] != 2 {
                return Err(Error::InvalidPattern(format!("output depends on unmeasured {d}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pattern serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }
}

fn toggle(set: &mut Vec<usize>, other: &[usize]) {
    for &v in other {
        if let Some(i) = set.iter().position(|&x| x == v) {
            set.swap_remove(i);
        } else {
            set.push(v);
        }
    }
    set.sort_unstable();
}

/// Compiles a lowered J/CZ sequence on `m` wires.
pub fn compile_ops(m: usize, ops: &[Op]) -> Result<MeasurementPattern> {
    let mut n = m;
    let input_vertices: Vec<usize> = (0..m).collect();
    let mut current = input_vertices.clone();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut measurements = Vec::new();
    let mut xs: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut zs: Vec<Vec<usize>> = vec![Vec::new(); m];
    for op in ops {
        match *op {
            Op::J(w, theta) => {
                if w >= m {
                    return Err(Error::InvalidCircuit(format!("wire {w} out of range")));
                }
                let v = current[w];
                let next = n;
                n += 1;
                edges.push((v, next));
                measurements.push(Measurement {
                    vertex: v,
                    angle: theta,
                    x_deps: xs[w].clone(),
                    z_deps: zs[w].clone(),
                });
                // X^{s_x} Z^{s_z} before J(θ) becomes Z^{s_x} after; the
                // measurement adds X^{outcome}
                zs[w] = std::mem::replace(&mut xs[w], vec![v]);
                current[w] = next;
            }
            Op::Cz(a, b) => {
                if a >= m || b >= m || a == b {
                    return Err(Error::InvalidCircuit(format!("bad CZ({a}, {b})")));
                }
                let e = (current[a].min(current[b]), current[a].max(current[b]));
                if let Some(i) = edges.iter().position(|&x| x == e || x == (e.1, e.0)) {
                    edges.swap_remove(i);
                } else {
                    edges.push(e);
                }
                let (xa, xb) = (xs[a].clone(), xs[b].clone());
                toggle(&mut zs[b], &xa);
                toggle(&mut zs[a], &xb);
            }
        }
    }
    let pattern = MeasurementPattern {
        graph: Graph::new(n, edges)?,
        input_vertices,
        output_vertices: current,
        measurements,
        output_x_deps: xs,
        output_z_deps: zs,
    };
    pattern.validate()?;
    Ok(pattern)
}

/// Pattern for a circuit: one line per wire, one measured vertex per J.
pub fn compile(c: &Circuit) -> Result<MeasurementPattern> {
    compile_ops(c.width(), &c.lowered())
}

/// Patterns for two circuits on one common graph, differing only in angles.
/// Uses the direct lowering when the skeletons already agree and the
/// canonical four-J-per-run form otherwise; the CZ sequences must match.
pub fn compile_pair(c0: &Circuit, c1: &Circuit) -> Result<(MeasurementPattern, MeasurementPattern)> {
    if c0.width() != c1.width() || c0.inputs() != c1.inputs() {
        return Err(Error::InvalidCircuit("circuits differ in width or input kinds".into()));
    }
    let (l0, l1) = (c0.lowered(), c1.lowered());
    let (l0, l1) = if same_skeleton(&l0, &l1) {
        (l0, l1)
    } else {
        let (k0, k1) = (canonical_lowering(c0)?, canonical_lowering(c1)?);
        if !same_skeleton(&k0, &k1) {
            return Err(Error::InvalidCircuit(
                "circuits have different CZ structure and cannot share a graph".into(),
            ));
        }
        (k0, k1)
    };
    let p0 = compile_ops(c0.width(), &l0)?;
    let p1 = compile_ops(c1.width(), &l1)?;
    debug_assert_eq!(p0.graph, p1.graph);
    Ok((p0, p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gates::Gate;

    #[test]
    fn single_j_is_two_vertex_line() {
        let c = Circuit::new(1).with_gates([Gate::J(0, 0.0)]).unwrap();
        let p = compile(&c).unwrap();
        assert_eq!(p.graph, Graph::line(2));
        assert_eq!(p.measurements.len(), 1);
        assert_eq!(p.measurements[0].vertex, 0);
        assert_eq!(p.measurements[0].angle, 0.0);
        assert_eq!(p.output_vertices, vec![1]);
        assert_eq!(p.output_x_deps, vec![vec![0]]);
        assert!(p.output_z_deps[0].is_empty());
    }

    #[test]
    fn cz_between_one_gate_wires() {
        let c = Circuit::new(2)
            .with_gates([Gate::J(0, 0.1), Gate::J(1, 0.2), Gate::Cz(0, 1)])
            .unwrap();
        let p = compile(&c).unwrap();
        assert_eq!(p.n_vertices(), 4);
        // two horizontal edges and one vertical edge between the outputs
        assert_eq!(p.graph.edges(), &[(0, 2), (1, 3), (2, 3)]);
        assert_eq!(p.output_z_deps, vec![vec![1], vec![0]]);
    }

    #[test]
    fn double_cz_cancels() {
        let c = Circuit::new(2).with_gates([Gate::Cz(0, 1), Gate::Cz(0, 1)]).unwrap();
        let p = compile(&c).unwrap();
        assert!(p.graph.edges().is_empty());
    }

    #[test]
    fn dependencies_follow_signal_rules() {
        let c = Circuit::new(1)
            .with_gates([Gate::J(0, 0.3), Gate::J(0, 0.5), Gate::J(0, 0.7)])
            .unwrap();
        let p = compile(&c).unwrap();
        assert_eq!(p.measurements[1].x_deps, vec![0]);
        assert!(p.measurements[1].z_deps.is_empty());
        assert_eq!(p.measurements[2].x_deps, vec![1]);
        assert_eq!(p.measurements[2].z_deps, vec![0]);
        assert_eq!(p.output_x_deps[0], vec![2]);
        assert_eq!(p.output_z_deps[0], vec![1]);
        let outcomes = [1u8, 0, 1, 0];
        assert!((p.adapted_angle(&p.measurements[2], &outcomes) - (0.7 + PI)).abs() < 1e-15);
        assert!((p.adapted_angle(&p.measurements[1], &outcomes) + 0.5).abs() < 1e-15);
        let b = p.byproduct(&outcomes);
        assert_eq!((b.x[0], b.z[0]), (true, false));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let c = Circuit::from_zero(2)
            .with_gates([Gate::H(0), Gate::Cx(0, 1), Gate::T(1)])
            .unwrap();
        let p = compile(&c).unwrap();
        let back = MeasurementPattern::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let mut broken = p.clone();
        broken.measurements.swap(0, 2);
        broken.measurements[0].x_deps = vec![broken.measurements[2].vertex];
        assert!(broken.validate().is_err());
    }

    #[test]
    fn pair_shares_graph() {
        let a = Circuit::from_zero(1);
        let b = Circuit::from_zero(1).with_gates([Gate::X(0)]).unwrap();
        let (p0, p1) = compile_pair(&a, &b).unwrap();
        assert_eq!(p0.graph, p1.graph);
        assert_eq!(p0.n_vertices(), 5);
        let c = Circuit::from_zero(2).with_gates([Gate::Cz(0, 1)]).unwrap();
        let d = Circuit::from_zero(2);
        assert!(compile_pair(&c, &d).is_err());
    }
}
