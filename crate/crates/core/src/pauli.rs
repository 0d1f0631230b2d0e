//! Pauli strings and their symbolic algebra.
//!
//! A label such as `"XZI"` is read left to right with the leftmost character
//! acting on the most significant qubit. Products of Pauli strings are again
//! Pauli strings up to a phase `i^k`, which is what makes nested commutators
//! cheap to evaluate symbolically.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_index(k: u8) -> Self {
        match k & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    /// `self * other = i^phase * result`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of single-qubit Paulis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        PauliString(ops)
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliString(vec![Pauli::I; n_qubits])
    }

    /// Parses an `IXYZ` label.
    pub fn parse(label: &str) -> Result<Self> {
        if label.is_empty() {
            return Err(Error::InvalidPauli {
                label: label.to_owned(),
                reason: "empty label".into(),
            });
        }
        label
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| Error::InvalidPauli {
                    label: label.to_owned(),
                    reason: format!("character {c:?} is not one of I, X, Y, Z"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }

    /// Builds the string whose base-4 digits (I=0, X=1, Y=2, Z=3) spell `code`,
    /// most significant qubit first.
    pub fn from_code(code: u64, n_qubits: usize) -> Self {
        let ops = (0..n_qubits)
            .rev()
            .map(|q| Pauli::from_index(((code >> (2 * q)) & 3) as u8))
            .collect();
        PauliString(ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|p| p.as_char()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Returns `(k, C)` with `self * other = i^k C`.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        assert_eq!(self.n_qubits(), other.n_qubits(), "qubit count mismatch");
        let mut phase = 0u8;
        let ops = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase = (phase + k) & 3;
                p
            })
            .collect();
        (phase, PauliString(ops))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// `[self, other]` as `coeff * C`, or `None` when the strings commute.
    /// The coefficient is always `±2i`.
    pub fn commutator(&self, other: &PauliString) -> Option<(Complex64, PauliString)> {
        if self.commutes_with(other) {
            return None;
        }
        let (k, c) = self.mul(other);
        Some((Complex64::new(2.0, 0.0) * phase_value(k), c))
    }
}

/// `i^k`.
pub fn phase_value(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Scalar multiple of a Pauli string, closed under commutators.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPauli {
    pub coeff: Complex64,
    pub pauli: PauliString,
}

impl ScaledPauli {
    pub fn unit(pauli: PauliString) -> Self {
        ScaledPauli {
            coeff: Complex64::new(1.0, 0.0),
            pauli,
        }
    }

    /// `[self, other]`, `None` meaning the zero operator.
    pub fn commutator(&self, other: &ScaledPauli) -> Option<ScaledPauli> {
        self.pauli
            .commutator(&other.pauli)
            .map(|(c, p)| ScaledPauli {
                coeff: self.coeff * other.coeff * c,
                pauli: p,
            })
    }

    /// Operator norm; Pauli strings have unit norm.
    pub fn norm(&self) -> f64 {
        self.coeff.norm()
    }
}

/// Operator norm of `[a, [b, c]]` evaluated symbolically. Always 0 or 4.
pub fn nested_commutator_norm(a: &PauliString, b: &PauliString, c: &PauliString) -> f64 {
    let inner = ScaledPauli::unit(b.clone()).commutator(&ScaledPauli::unit(c.clone()));
    inner
        .and_then(|bc| ScaledPauli::unit(a.clone()).commutator(&bc))
        .map_or(0.0, |x| x.norm())
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.label())
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PauliString::parse(&s).map_err(serde::de::Error::custom)
    }
}
