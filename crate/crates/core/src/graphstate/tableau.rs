//! Stabilizer tableau with destabilizer rows (Aaronson–Gottesman layout).
//!
//! Each row is stored as `i^k X^x Z^z` with bit-packed `x`, `z` words, so
//! multiplying two rows costs a handful of word operations:
//! `X^{x1}Z^{z1} · X^{x2}Z^{z2} = (−1)^{|z1 ∧ x2|} X^{x1⊕x2} Z^{z1⊕z2}`.

use rand::Rng;

use super::graph::Graph;
use crate::qcore::pauli::{Pauli, PauliString, Phase};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    /// Exponent of i, mod 4.
    k: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn parity(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(p, q)| (p & q).count_ones()).sum::<u32>() % 2
}

impl Row {
    fn identity(n: usize) -> Self {
        Self {
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            k: 0,
        }
    }

    fn get(bits: &[u64], q: usize) -> bool {
        (bits[q / 64] >> (q % 64)) & 1 == 1
    }

    fn flip(bits: &mut [u64], q: usize) {
        bits[q / 64] ^= 1 << (q % 64);
    }

    fn commutes(&self, other: &Row) -> bool {
        (parity(&self.x, &other.z) + parity(&self.z, &other.x)).is_multiple_of(2)
    }

    /// self ← self · other
    fn mul_assign(&mut self, other: &Row) {
        let sign = parity(&self.z, &other.x) as u8;
        self.k = (self.k + other.k + 2 * sign) % 4;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Y = i·X·Z, so each Y letter contributes one factor of i.
    fn from_pauli(p: &PauliString) -> Self {
        let mut row = Self::identity(p.n_qubits());
        let mut k = p.phase.power();
        for (q, &l) in p.letters.iter().enumerate() {
            if l.has_x() {
                Self::flip(&mut row.x, q);
            }
            if l.has_z() {
                Self::flip(&mut row.z, q);
            }
            if l == Pauli::Y {
                k += 1;
            }
        }
        row.k = k % 4;
        row
    }

    fn to_pauli(&self, n: usize) -> PauliString {
        let mut k = self.k;
        let letters = (0..n)
            .map(|q| {
                let (x, z) = (Self::get(&self.x, q), Self::get(&self.z, q));
                if x && z {
                    // X Z = −i Y
                    k += 3;
                }
                Pauli::from_bits(x, z)
            })
            .collect();
        PauliString {
            letters,
            phase: Phase::from_power(k),
        }
    }
}

/// Rows `0..n` are destabilizers, rows `n..2n` stabilizer generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    rows: Vec<Row>,
}

impl StabilizerTableau {
    /// |0…0⟩: destabilizers X_q, stabilizers Z_q.
    pub fn zeros(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            let mut r = Row::identity(n);
            Row::flip(&mut r.x, q);
            rows.push(r);
        }
        for q in 0..n {
            let mut r = Row::identity(n);
            Row::flip(&mut r.z, q);
            rows.push(r);
        }
        Self { n, rows }
    }

    /// |G⟩: stabilizers g_j, destabilizers Z_j.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n_vertices();
        let mut rows = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut r = Row::identity(n);
            Row::flip(&mut r.z, j);
            rows.push(r);
        }
        for j in 0..n {
            let mut r = Row::identity(n);
            Row::flip(&mut r.x, j);
            for &i in g.neighbors(j) {
                Row::flip(&mut r.z, i);
            }
            rows.push(r);
        }
        Self { n, rows }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        self.rows[self.n..].iter().map(|r| r.to_pauli(self.n)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        self.rows[..self.n].iter().map(|r| r.to_pauli(self.n)).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n,
            });
        }
        Ok(())
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.n_qubits(),
            });
        }
        if !p.is_hermitian() {
            return Err(Error::NonHermitianPauli);
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        for r in &mut self.rows {
            let (x, z) = (Row::get(&r.x, q), Row::get(&r.z, q));
            if x && z {
                r.k = (r.k + 2) % 4;
            }
            if x != z {
                Row::flip(&mut r.x, q);
                Row::flip(&mut r.z, q);
            }
        }
        Ok(())
    }

    pub fn apply_s(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        for r in &mut self.rows {
            if Row::get(&r.x, q) {
                r.k = (r.k + 1) % 4;
                Row::flip(&mut r.z, q);
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::InvalidParameter("CZ on a single qubit".into()));
        }
        for r in &mut self.rows {
            let (xa, xb) = (Row::get(&r.x, a), Row::get(&r.x, b));
            if xa && xb {
                r.k = (r.k + 2) % 4;
            }
            if xa {
                Row::flip(&mut r.z, b);
            }
            if xb {
                Row::flip(&mut r.z, a);
            }
        }
        Ok(())
    }

    /// Index of the first stabilizer row anticommuting with `p`, if any.
    fn first_anticommuting(&self, p: &Row) -> Option<usize> {
        (self.n..2 * self.n).find(|&i| !self.rows[i].commutes(p))
    }

    /// ±1 when `p` (or −p) is in the stabilizer group; the sign is found by
    /// multiplying the stabilizers whose destabilizer partners anticommute.
    fn deterministic_sign(&self, p: &Row) -> i8 {
        let mut acc = Row::identity(self.n);
        for i in 0..self.n {
            if !self.rows[i].commutes(p) {
                acc.mul_assign(&self.rows[i + self.n]);
            }
        }
        // p = i^{k_p − k_acc} · acc and acc stabilizes the state
        match (4 + p.k - acc.k) % 4 {
            0 => 1,
            2 => -1,
            _ => unreachable!("Hermitian Pauli with stabilized letters has a real relative phase"),
        }
    }

    /// ⟨P⟩ ∈ {−1, 0, +1}.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        self.check_pauli(p)?;
        let row = Row::from_pauli(p);
        if self.first_anticommuting(&row).is_some() {
            return Ok(0.0);
        }
        Ok(self.deterministic_sign(&row) as f64)
    }

    /// Projective measurement of a Hermitian Pauli product. Returns ±1; the
    /// outcome is uniform when `p` anticommutes with some stabilizer.
    pub fn measure_pauli(&mut self, p: &PauliString, rng: &mut impl Rng) -> Result<i8> {
        let forced = if rng.random_bool(0.5) { 1 } else { -1 };
        self.measure_pauli_with(p, forced)
    }

    /// As [`measure_pauli`](Self::measure_pauli) but a random outcome is
    /// replaced by `forced`; deterministic outcomes ignore it.
    pub fn measure_pauli_with(&mut self, p: &PauliString, forced: i8) -> Result<i8> {
        self.check_pauli(p)?;
        let row = Row::from_pauli(p);
        let Some(pivot) = self.first_anticommuting(&row) else {
            return Ok(self.deterministic_sign(&row));
        };
        let pivot_row = self.rows[pivot].clone();
        for i in 0..2 * self.n {
            if i != pivot && !self.rows[i].commutes(&row) {
                self.rows[i].mul_assign(&pivot_row);
            }
        }
        self.rows[pivot - self.n] = pivot_row;
        let mut new = row;
        if forced < 0 {
            new.k = (new.k + 2) % 4;
        }
        self.rows[pivot] = new;
        Ok(if forced < 0 { -1 } else { 1 })
    }
}

/// Functional form of [`StabilizerTableau::measure_pauli`].
pub fn tableau_measure_pauli(
    mut t: StabilizerTableau,
    p: &PauliString,
    rng: &mut impl Rng,
) -> Result<(i8, StabilizerTableau)> {
    let o = t.measure_pauli(p, rng)?;
    Ok((o, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstate::state::{build_graph_state, stabilizer_generator};
    use crate::qcore::state::StateVector;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
        let letters = (0..n)
            .map(|_| match rng.random_range(0..4) {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        let phase = if rng.random_bool(0.5) { Phase::ONE } else { Phase::MINUS_ONE };
        PauliString { letters, phase }
    }

    /// (I + sP)/2 |ψ⟩ renormalized, the dense oracle for a measurement.
    fn project(psi: &StateVector, p: &PauliString, sign: i8) -> Option<StateVector> {
        let pp = p.apply(psi).unwrap();
        let amps = psi
            .amplitudes()
            .iter()
            .zip(pp.amplitudes())
            .map(|(a, b)| (a + b * sign as f64) * 0.5)
            .collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        (s.normalize() > 1e-7).then_some(s)
    }

    #[test]
    fn generators_are_deterministic() {
        let g = Graph::lattice(3, 2);
        let mut t = StabilizerTableau::from_graph(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for j in 0..6 {
            let gj = stabilizer_generator(&g, j).unwrap();
            assert_eq!(t.measure_pauli(&gj, &mut rng).unwrap(), 1);
        }
        assert_eq!(t, StabilizerTableau::from_graph(&g));
    }

    #[test]
    fn z_on_connected_vertex_is_fair() {
        let g = Graph::line(3);
        let z = PauliString::single(3, 1, Pauli::Z);
        let t = StabilizerTableau::from_graph(&g);
        assert_eq!(t.expectation(&z).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut plus = 0;
        for _ in 0..2000 {
            let mut t2 = t.clone();
            let o = t2.measure_pauli(&z, &mut rng).unwrap();
            // repeatability
            assert_eq!(t2.measure_pauli(&z, &mut rng).unwrap(), o);
            if o == 1 {
                plus += 1;
            }
        }
        // 4σ for a fair coin over 2000 trials is ~89
        assert!((plus - 1000i32).abs() < 90);
    }

    #[test]
    fn matches_dense_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in 1..=10 {
            let g = Graph::random(n, 0.5, &mut rng);
            let t = StabilizerTableau::from_graph(&g);
            let psi = build_graph_state(&g).unwrap();
            for _ in 0..20 {
                // random product of generators, possibly times a random Pauli
                let mut p = PauliString::identity(n);
                for j in 0..n {
                    if rng.random_bool(0.5) {
                        p = p.mul(&stabilizer_generator(&g, j).unwrap()).unwrap();
                    }
                }
                assert_eq!(t.expectation(&p).unwrap(), 1.0);
                let q = random_pauli(n, &mut rng);
                let dense = q.expectation(&psi).unwrap();
                assert!((t.expectation(&q).unwrap() - dense).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn measurement_matches_dense_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let n = rng.random_range(1..=6);
            let g = Graph::random(n, 0.5, &mut rng);
            let mut t = StabilizerTableau::from_graph(&g);
            let mut psi = build_graph_state(&g).unwrap();
            for _ in 0..4 {
                let p = random_pauli(n, &mut rng);
                let o = t.measure_pauli(&p, &mut rng).unwrap();
                psi = project(&psi, &p, o).expect("tableau outcome must be possible");
                for s in t.stabilizers() {
                    assert!((s.expectation(&psi).unwrap() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn zeros_and_gates() {
        // H then CZ on |00⟩ then H on qubit 1 gives a Bell state: ZZ and XX stabilize
        let mut t = StabilizerTableau::zeros(2);
        t.apply_h(0).unwrap();
        t.apply_h(1).unwrap();
        t.apply_cz(0, 1).unwrap();
        t.apply_h(1).unwrap();
        assert_eq!(t.expectation(&"ZZ".parse().unwrap()).unwrap(), 1.0);
        assert_eq!(t.expectation(&"XX".parse().unwrap()).unwrap(), 1.0);
        assert_eq!(t.expectation(&"YY".parse().unwrap()).unwrap(), -1.0);
        t.apply_s(0).unwrap();
        assert_eq!(t.expectation(&"YX".parse().unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn rejects_imaginary_phase() {
        let t = StabilizerTableau::zeros(1);
        let p = PauliString::single(1, 0, Pauli::Z).with_phase(Phase::I);
        assert!(matches!(t.expectation(&p), Err(Error::NonHermitianPauli)));
    }

    proptest! {
        #[test]
        fn stabilizer_rows_commute_after_measurements(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..=8);
            let g = Graph::random(n, 0.4, &mut rng);
            let mut t = StabilizerTableau::from_graph(&g);
            for _ in 0..5 {
                let p = random_pauli(n, &mut rng);
                t.measure_pauli(&p, &mut rng).unwrap();
            }
            let stabs = t.stabilizers();
            let destabs = t.destabilizers();
            for a in 0..n {
                prop_assert!(stabs[a].is_hermitian());
                for b in 0..n {
                    prop_assert!(stabs[a].commutes_with(&stabs[b]));
                    // symplectic pairing: destabilizer a anticommutes only with stabilizer a
                    prop_assert_eq!(destabs[a].commutes_with(&stabs[b]), a != b);
                }
            }
        }
    }
}
