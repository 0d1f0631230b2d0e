//! Hamiltonian term lists: validation, the `hamiltonian-terms-v1` file
//! format, sorting and synthetic power-law generation.

use std::collections::{HashMap, HashSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::Accumulator;
use crate::pauli::{Pauli, PauliString};

pub const HAMILTONIAN_FORMAT: &str = "hamiltonian-terms-v1";

/// One weighted Pauli term `coeff * pauli`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

impl HamTerm {
    pub fn new(coeff: f64, pauli: PauliString) -> Self {
        HamTerm { coeff, pauli }
    }

    /// Term strength used by every bound.
    pub fn magnitude(&self) -> f64 {
        self.coeff.abs()
    }
}

/// Validated, immutable list of Hamiltonian terms.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    terms: Vec<HamTerm>,
    provenance: String,
}

impl HamiltonianSpec {
    /// Checks every invariant: matching label lengths, finite nonzero
    /// coefficients, no identity term, no duplicate labels, at least one term.
    pub fn new(
        n_qubits: usize,
        terms: Vec<HamTerm>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("n_qubits must be positive".into()));
        }
        if terms.is_empty() {
            return Err(Error::TooFewTerms {
                required: 1,
                found: 0,
            });
        }
        let mut seen: HashMap<&PauliString, usize> = HashMap::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if term.pauli.n_qubits() != n_qubits {
                return Err(Error::InvalidPauli {
                    label: term.pauli.label(),
                    reason: format!("length {} but n_qubits = {n_qubits}", term.pauli.n_qubits()),
                });
            }
            if !term.coeff.is_finite() || term.coeff == 0.0 {
                return Err(Error::InvalidCoefficient {
                    index: i,
                    value: term.coeff,
                });
            }
            if term.pauli.is_identity() {
                return Err(Error::InvalidPauli {
                    label: term.pauli.label(),
                    reason: "all-identity term".into(),
                });
            }
            if let Some(first) = seen.insert(&term.pauli, i) {
                return Err(Error::DuplicateLabel {
                    label: term.pauli.label(),
                    first,
                    second: i,
                });
            }
        }
        Ok(HamiltonianSpec {
            n_qubits,
            terms,
            provenance: provenance.into(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[HamTerm] {
        &self.terms
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Number of terms `L`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `|coeff_j|` in term order.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.terms.iter().map(HamTerm::magnitude).collect()
    }

    pub fn lambda(&self) -> f64 {
        lambda_norm(self)
    }

    /// Stable permutation sorting terms by decreasing magnitude:
    /// `perm[k]` is the original index of the k-th sorted term.
    pub fn sort_permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.terms.len()).collect();
        perm.sort_by(|&a, &b| {
            self.terms[b]
                .magnitude()
                .partial_cmp(&self.terms[a].magnitude())
                .expect("coefficients are finite")
        });
        perm
    }

    pub fn is_sorted_desc(&self) -> bool {
        self.terms
            .windows(2)
            .all(|w| w[0].magnitude() >= w[1].magnitude())
    }
}

/// `λ = Σ_j |coeff_j|`.
pub fn lambda_norm(spec: &HamiltonianSpec) -> f64 {
    let mut acc = Accumulator::default();
    for t in spec.terms() {
        acc.add(t.magnitude());
    }
    acc.value()
}

/// Returns the terms ordered by decreasing `|coeff|`, ties kept in original order.
pub fn sort_terms_desc(spec: &HamiltonianSpec) -> HamiltonianSpec {
    let terms = spec
        .sort_permutation()
        .into_iter()
        .map(|i| spec.terms[i].clone())
        .collect();
    HamiltonianSpec {
        n_qubits: spec.n_qubits,
        terms,
        provenance: spec.provenance.clone(),
    }
}

#[derive(Serialize, Deserialize)]
struct HamiltonianFile {
    format: String,
    n_qubits: usize,
    #[serde(default)]
    provenance: String,
    terms: Vec<RawTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    coeff: f64,
    pauli: String,
}

/// Result of parsing a Hamiltonian file, with the warnings raised by
/// dropped terms.
#[derive(Debug, Clone)]
pub struct ParsedHamiltonian {
    pub spec: HamiltonianSpec,
    pub warnings: Vec<String>,
}

/// Parses a `hamiltonian-terms-v1` document.
///
/// All-identity terms and exact-zero coefficients are dropped with a warning;
/// everything else that breaks an invariant is an error.
pub fn parse_hamiltonian(document: &[u8]) -> Result<ParsedHamiltonian> {
    let file: HamiltonianFile = serde_json::from_slice(document)?;
    if file.format != HAMILTONIAN_FORMAT {
        return Err(Error::FormatTag {
            expected: HAMILTONIAN_FORMAT,
            found: file.format,
        });
    }
    let mut warnings = Vec::new();
    let mut terms = Vec::with_capacity(file.terms.len());
    for (i, raw) in file.terms.into_iter().enumerate() {
        let pauli = PauliString::parse(&raw.pauli)?;
        if pauli.n_qubits() != file.n_qubits {
            return Err(Error::InvalidPauli {
                label: raw.pauli,
                reason: format!(
                    "length {} but n_qubits = {}",
                    pauli.n_qubits(),
                    file.n_qubits
                ),
            });
        }
        if !raw.coeff.is_finite() {
            return Err(Error::InvalidCoefficient {
                index: i,
                value: raw.coeff,
            });
        }
        if pauli.is_identity() {
            warnings.push(format!(
                "term {i}: dropped all-identity term (coeff {})",
                raw.coeff
            ));
            continue;
        }
        if raw.coeff == 0.0 {
            warnings.push(format!(
                "term {i}: dropped zero-coefficient term {}",
                raw.pauli
            ));
            continue;
        }
        terms.push(HamTerm::new(raw.coeff, pauli));
    }
    let spec = HamiltonianSpec::new(file.n_qubits, terms, file.provenance)?;
    Ok(ParsedHamiltonian { spec, warnings })
}

/// Writes a spec as pretty-printed `hamiltonian-terms-v1` JSON, terms in order.
pub fn serialize_hamiltonian(spec: &HamiltonianSpec) -> String {
    let file = HamiltonianFile {
        format: HAMILTONIAN_FORMAT.to_owned(),
        n_qubits: spec.n_qubits,
        provenance: spec.provenance.clone(),
        terms: spec
            .terms
            .iter()
            .map(|t| RawTerm {
                coeff: t.coeff,
                pauli: t.pauli.label(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data serializes");
    out.push('\n');
    out
}

/// Synthetic spec with magnitudes `j^(-exponent)`, `j = 1..=L`, distinct random
/// non-identity labels and random signs. Fully determined by `seed`.
pub fn synth_power_law(
    l: usize,
    exponent: f64,
    n_qubits: usize,
    seed: u64,
) -> Result<HamiltonianSpec> {
    if l == 0 || n_qubits == 0 {
        return Err(Error::InvalidArgument(
            "L and n_qubits must be positive".into(),
        ));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exponent must be positive, got {exponent}"
        )));
    }
    // 4^n - 1 non-identity strings; saturates for large n.
    let available = if n_qubits < 32 {
        (1u64 << (2 * n_qubits)) - 1
    } else {
        u64::MAX
    };
    if (l as u64) > available {
        return Err(Error::InvalidArgument(format!(
            "L = {l} exceeds the {available} non-identity Pauli strings on {n_qubits} qubits"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<PauliString> = if n_qubits < 32 {
        index::sample(&mut rng, available as usize, l)
            .into_iter()
            .map(|code| PauliString::from_code(code as u64 + 1, n_qubits))
            .collect()
    } else {
        let mut seen = HashSet::with_capacity(l);
        let mut out = Vec::with_capacity(l);
        while out.len() < l {
            let ops: Vec<Pauli> = (0..n_qubits)
                .map(|_| match rng.gen_range(0..4) {
                    0 => Pauli::I,
                    1 => Pauli::X,
                    2 => Pauli::Y,
                    _ => Pauli::Z,
                })
                .collect();
            let p = PauliString::new(ops);
            if !p.is_identity() && seen.insert(p.clone()) {
                out.push(p);
            }
        }
        out
    };

    let terms = labels
        .into_iter()
        .enumerate()
        .map(|(i, pauli)| {
            let magnitude = ((i + 1) as f64).powf(-exponent);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            HamTerm::new(sign * magnitude, pauli)
        })
        .collect();
    HamiltonianSpec::new(
        n_qubits,
        terms,
        format!(
            "synthetic power-law: L={l}, exponent={exponent}, n_qubits={n_qubits}, seed={seed}"
        ),
    )
}
