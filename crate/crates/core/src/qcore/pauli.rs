use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ZERO};
use super::state::StateVector;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// `a·b = i^k · c`; returns `(k, c)`.
    pub fn product(a: Pauli, b: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (a, b) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase restricted to the fourth roots of unity, stored as the
/// exponent `k` of `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// ±1 for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

/// Tensor product of single-qubit Paulis with a global phase; `letters[q]`
/// acts on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n],
            phase: Phase::ONE,
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.letters[qubit] = p;
        s
    }

    /// Z on every listed qubit.
    pub fn z_string(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::identity(n);
        for q in qubits {
            s.letters[q] = Pauli::Z;
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.letters.len())
            .filter(|&q| self.letters[q] != Pauli::I)
            .collect()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Exact group product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                found: other.n_qubits(),
            });
        }
        let mut k = self.phase.power() + other.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (dk, p) = Pauli::product(a, b);
                k += dk;
                p
            })
            .collect();
        Ok(Self {
            letters,
            phase: Phase::from_power(k),
        })
    }

    fn masks(&self) -> (usize, usize, u8) {
        let mut xm = 0usize;
        let mut zm = 0usize;
        let mut ny = 0u8;
        for (q, &p) in self.letters.iter().enumerate() {
            if p.has_x() {
                xm |= 1 << q;
            }
            if p.has_z() {
                zm |= 1 << q;
            }
            if p == Pauli::Y {
                ny += 1;
            }
        }
        (xm, zm, ny)
    }

    /// P|b⟩ = phase · i^{#Y} · (−1)^{|b ∧ z|} |b ⊕ x⟩, from Y = i·X·Z.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                found: state.n_qubits(),
            });
        }
        let (xm, zm, ny) = self.masks();
        let global = (self.phase * Phase::from_power(ny)).to_complex();
        let src = state.amplitudes();
        let mut out = vec![ZERO; src.len()];
        for (b, a) in src.iter().enumerate() {
            let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ xm] = a * global * sign;
        }
        StateVector::from_amplitudes(out)
    }

    /// ⟨ψ|P|ψ⟩ for Hermitian P.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if !self.is_hermitian() {
            return Err(Error::NonHermitianPauli);
        }
        Ok(state.inner(&self.apply(state)?).re)
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.n_qubits();
        let dim = 1usize << n;
        let (xm, zm, ny) = self.masks();
        let global = (self.phase * Phase::from_power(ny)).to_complex();
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(b ^ xm, b)] = global * sign;
        }
        m
    }

    /// Restricts to the listed qubits (in order), dropping the rest.
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        Self {
            letters: qubits.iter().map(|&q| self.letters[q]).collect(),
            phase: self.phase,
        }
    }
}

impl fmt::Display for PauliString {
    /// `+XZI` style; letters listed from qubit 0 upwards.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for p in &self.letters {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidParameter(format!("bad Pauli letter `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { letters, phase })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::haar_state;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arb_pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
        (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(|(ls, k)| PauliString {
            letters: ls
                .into_iter()
                .map(|l| match l {
                    0 => Pauli::I,
                    1 => Pauli::X,
                    2 => Pauli::Y,
                    _ => Pauli::Z,
                })
                .collect(),
            phase: Phase::from_power(k),
        })
    }

    proptest! {
        #[test]
        fn product_matches_matrix_product(a in arb_pauli_string(3), b in arb_pauli_string(3)) {
            let ab = a.mul(&b).unwrap();
            let dense = &a.to_matrix() * &b.to_matrix();
            prop_assert!(ab.to_matrix().max_abs_diff(&dense) < 1e-14);
        }

        #[test]
        fn commutation_matches_matrices(a in arb_pauli_string(3), b in arb_pauli_string(3)) {
            let ab = &a.to_matrix() * &b.to_matrix();
            let ba = &b.to_matrix() * &a.to_matrix();
            prop_assert_eq!(a.commutes_with(&b), ab.max_abs_diff(&ba) < 1e-14);
        }
    }

    #[test]
    fn apply_agrees_with_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = haar_state(3, &mut rng);
        let p: PauliString = "-iXYZ".parse().unwrap();
        let direct = p.apply(&psi).unwrap();
        let via_matrix = p.to_matrix().mul_vec(psi.amplitudes()).unwrap();
        for (a, b) in direct.amplitudes().iter().zip(&via_matrix) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn display_round_trip() {
        let p: PauliString = "-XIZY".parse().unwrap();
        assert_eq!(p.to_string(), "-XIZY");
        assert_eq!(p.phase, Phase::MINUS_ONE);
    }

    #[test]
    fn x_on_zero_has_zero_expectation() {
        let x = PauliString::single(1, 0, Pauli::X);
        assert_eq!(x.expectation(&StateVector::zeros(1)).unwrap(), 0.0);
        let non_herm = x.with_phase(Phase::I);
        assert!(non_herm.expectation(&StateVector::zeros(1)).is_err());
    }
}
