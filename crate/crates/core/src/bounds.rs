//! Error bounds for stochastic sparsification and the baseline compilers.
//!
//! Every bound returns the same [`BoundBreakdown`] so that sweeps can treat
//! methods uniformly. Coefficients enter only through their magnitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::moments::{compensated_sum, s1, s2, s3_aaa, Accumulator};
use crate::pauli::nested_commutator_norm;

pub const PROBABILITIES_FORMAT: &str = "probabilities-v1";

/// Largest `L` accepted by the O(L³) commutator refinement.
pub const COMMUTATOR_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzTag {
    Linear,
    Uniform,
    AllOne,
    Custom,
}

/// Per-term keep probabilities `p_j`, aligned to a spec's term order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityAssignment {
    p: Vec<f64>,
    active_count: usize,
    ansatz_tag: AnsatzTag,
    /// Expected gate count per step requested at construction, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<f64>,
}

impl ProbabilityAssignment {
    /// Validates `0 < p_j <= 1` and `active_count <= len`.
    pub fn new(p: Vec<f64>, active_count: usize, ansatz_tag: AnsatzTag) -> Result<Self> {
        for (index, &value) in p.iter().enumerate() {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        if active_count > p.len() {
            return Err(Error::InvalidArgument(format!(
                "active_count {active_count} exceeds {} terms",
                p.len()
            )));
        }
        Ok(ProbabilityAssignment {
            p,
            active_count,
            ansatz_tag,
            budget: None,
        })
    }

    pub fn all_ones(l: usize) -> Self {
        ProbabilityAssignment {
            p: vec![1.0; l],
            active_count: l,
            ansatz_tag: AnsatzTag::AllOne,
            budget: Some(l as f64),
        }
    }

    pub(crate) fn with_budget(mut self, budget: f64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn ansatz_tag(&self) -> AnsatzTag {
        self.ansatz_tag
    }

    pub fn budget(&self) -> Option<f64> {
        self.budget
    }

    /// `μ = Σ p_j`.
    pub fn mu(&self) -> f64 {
        compensated_sum(&self.p)
    }

    /// Reorders so that entry `k` is the old entry `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        ProbabilityAssignment {
            p: perm.iter().map(|&i| self.p[i]).collect(),
            ..self.clone()
        }
    }

    /// Checks alignment with `spec` and that the `active_count` largest terms
    /// are kept with probability exactly 1.
    pub fn check_against(&self, spec: &HamiltonianSpec) -> Result<()> {
        if self.p.len() != spec.len() {
            return Err(Error::LengthMismatch {
                expected: spec.len(),
                found: self.p.len(),
            });
        }
        for (k, &i) in spec
            .sort_permutation()
            .iter()
            .take(self.active_count)
            .enumerate()
        {
            if self.p[i] != 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "active term {k} (index {i}) has p = {} instead of 1",
                    self.p[i]
                )));
            }
        }
        Ok(())
    }
}

/// Term order a probability file is aligned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianOrder {
    File,
    SortedDesc,
}

#[derive(Serialize, Deserialize)]
struct ProbabilityFile {
    format: String,
    hamiltonian_order: HamiltonianOrder,
    active_count: usize,
    p: Vec<f64>,
}

/// Parses a `probabilities-v1` document and returns the assignment aligned to
/// `spec`'s file order.
pub fn parse_probabilities(
    document: &[u8],
    spec: &HamiltonianSpec,
) -> Result<ProbabilityAssignment> {
    let file: ProbabilityFile = serde_json::from_slice(document)?;
    if file.format != PROBABILITIES_FORMAT {
        return Err(Error::FormatTag {
            expected: PROBABILITIES_FORMAT,
            found: file.format,
        });
    }
    if file.p.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            found: file.p.len(),
        });
    }
    let assignment = ProbabilityAssignment::new(file.p, file.active_count, AnsatzTag::Custom)?;
    let assignment = match file.hamiltonian_order {
        HamiltonianOrder::File => assignment,
        HamiltonianOrder::SortedDesc => {
            let perm = spec.sort_permutation();
            let mut inverse = vec![0; perm.len()];
            for (k, &i) in perm.iter().enumerate() {
                inverse[i] = k;
            }
            assignment.permuted(&inverse)
        }
    };
    assignment.check_against(spec)?;
    Ok(assignment)
}

/// Writes an assignment as `probabilities-v1`, tagging it with the order its
/// entries are aligned to.
pub fn serialize_probabilities(
    assignment: &ProbabilityAssignment,
    order: HamiltonianOrder,
) -> String {
    let file = ProbabilityFile {
        format: PROBABILITIES_FORMAT.to_owned(),
        hamiltonian_order: order,
        active_count: assignment.active_count,
        p: assignment.p.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data serializes");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Complete,
    /// Complete bound with the triple-sum term replaced by explicit nested
    /// commutator norms.
    CompleteCommutator,
    Simplified,
    RandomizedTrotter,
    Qdrift,
    Trotter1,
}

/// Values a bound was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub t: f64,
    pub gates: f64,
    pub n_terms: usize,
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub method: BoundMethod,
    pub eps1: f64,
    pub eps2: f64,
    pub eps31: f64,
    pub eps32: f64,
    pub total: f64,
    pub inputs: BoundInputs,
}

impl BoundBreakdown {
    fn from_parts(
        method: BoundMethod,
        eps1: f64,
        eps2: f64,
        eps31: f64,
        eps32: f64,
        inputs: BoundInputs,
    ) -> Self {
        BoundBreakdown {
            method,
            eps1,
            eps2,
            eps31,
            eps32,
            total: eps1 + eps2 + eps31 + eps32,
            inputs,
        }
    }

    fn total_only(method: BoundMethod, total: f64, inputs: BoundInputs) -> Self {
        BoundBreakdown {
            method,
            eps1: 0.0,
            eps2: 0.0,
            eps31: 0.0,
            eps32: 0.0,
            total,
            inputs,
        }
    }
}

/// Vectors derived from `h` and `p`:
/// `u_j = (1/p_j - 1) h_j²`, `v_j = (1/p_j² - 1) h_j³`,
/// `w_j = (3/p_j - 1) h_j²`, `q_j = h_j / p_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedVectors {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub q: Vec<f64>,
}

impl DerivedVectors {
    pub fn new(h: &[f64], p: &[f64]) -> Self {
        let n = h.len();
        let (mut u, mut v, mut w, mut q) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for (&hj, &pj) in h.iter().zip(p) {
            let inv = 1.0 / pj;
            let h2 = hj * hj;
            u.push((inv - 1.0) * h2);
            v.push((inv * inv - 1.0) * h2 * hj);
            w.push((3.0 * inv - 1.0) * h2);
            q.push(hj * inv);
        }
        DerivedVectors { u, v, w, q }
    }
}

fn check_time_gates(t: f64, gates: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be positive, got {t}"
        )));
    }
    if !(gates > 0.0 && gates.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gate budget must be positive, got {gates}"
        )));
    }
    Ok(())
}

fn check_inputs(
    spec: &HamiltonianSpec,
    p: &ProbabilityAssignment,
    t: f64,
    gates: f64,
) -> Result<()> {
    if spec.len() < 3 {
        return Err(Error::TooFewTerms {
            required: 3,
            found: spec.len(),
        });
    }
    if p.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            found: p.len(),
        });
    }
    for (index, &value) in p.p().iter().enumerate() {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::InvalidProbability { index, value });
        }
    }
    check_time_gates(t, gates)
}

/// Tail terms `(ε₃,₁, ε₃,₂)`.
///
/// `ε₃,₂` carries the product `p_1 ⋯ p_L`, which underflows for long term
/// lists, so it is evaluated as `exp(Σ ln p_j + 4 ln S(q))`; when that
/// exponent is below the log of the smallest normal double the tail is 0.
fn tails(h: &[f64], p: &[f64], q: &[f64], lambda: f64, mu: f64, t: f64, gates: f64) -> (f64, f64) {
    debug_assert_eq!(h.len(), p.len());
    let prefactor = 2.0 * t.powi(4) * mu.powi(3) / (3.0 * gates.powi(3));
    let eps31 = prefactor * lambda.powi(4);
    let mut log_prod = Accumulator::default();
    for &pj in p {
        log_prod.add(pj.ln());
    }
    let log_core = log_prod.value() + 4.0 * s1(q).ln();
    let eps32 = if log_core < f64::MIN_POSITIVE.ln() {
        0.0
    } else {
        prefactor * log_core.exp()
    };
    (eps31, eps32)
}

/// Complete bound `ε = ε₁ + ε₂ + ε₃,₁ + ε₃,₂` with
///
/// ```text
/// ε₁   = (2t²μ/G) S(u)
/// ε₂   = (4t³μ²/3G²)(S(v) + S(w,h)) + (16t³μ²/9G²) S(h,h,h)
/// ε₃,₁ = 2t⁴μ³λ⁴ / 3G³
/// ε₃,₂ = (2t⁴μ³/3G³) (p_1⋯p_L) S(q)⁴
/// ```
///
/// The repeat count `G/μ` is treated as a real number.
pub fn complete_bound(
    spec: &HamiltonianSpec,
    p: &ProbabilityAssignment,
    t: f64,
    gates: f64,
) -> Result<BoundBreakdown> {
    check_inputs(spec, p, t, gates)?;
    let h = spec.magnitudes();
    let d = DerivedVectors::new(&h, p.p());
    let lambda = s1(&h);
    let mu = p.mu();
    let g2 = gates * gates;
    let t3 = t.powi(3);

    let eps1 = 2.0 * t * t * mu / gates * s1(&d.u);
    let eps2 = 4.0 * t3 * mu * mu / (3.0 * g2) * (s1(&d.v) + s2(&d.w, &h)?)
        + 16.0 * t3 * mu * mu / (9.0 * g2) * s3_aaa(&h);
    let (eps31, eps32) = tails(&h, p.p(), &d.q, lambda, mu, t, gates);
    Ok(BoundBreakdown::from_parts(
        BoundMethod::Complete,
        eps1,
        eps2,
        eps31,
        eps32,
        BoundInputs {
            t,
            gates,
            n_terms: h.len(),
            lambda,
            mu,
        },
    ))
}

/// Simplified bound: `ε₁ = (2t²μ/G)‖u‖₁`, `ε₂ = (4t³μ²/3G²)(‖v‖₁ + λ‖w‖₁ + 4λ³/3)`,
/// with the explicit tails of [`complete_bound`] attached so the total stays rigorous.
pub fn simplified_bound(
    spec: &HamiltonianSpec,
    p: &ProbabilityAssignment,
    t: f64,
    gates: f64,
) -> Result<BoundBreakdown> {
    check_inputs(spec, p, t, gates)?;
    let h = spec.magnitudes();
    let d = DerivedVectors::new(&h, p.p());
    let lambda = s1(&h);
    let mu = p.mu();
    let k = s1(&d.v) + lambda * s1(&d.w) + 4.0 * lambda.powi(3) / 3.0;
    let eps1 = 2.0 * t * t * mu / gates * s1(&d.u);
    let eps2 = 4.0 * t.powi(3) * mu * mu / (3.0 * gates * gates) * k;
    let (eps31, eps32) = tails(&h, p.p(), &d.q, lambda, mu, t, gates);
    Ok(BoundBreakdown::from_parts(
        BoundMethod::Simplified,
        eps1,
        eps2,
        eps31,
        eps32,
        BoundInputs {
            t,
            gates,
            n_terms: h.len(),
            lambda,
            mu,
        },
    ))
}

/// Randomized first-order Trotter (all `p_j = 1`): leading term
/// `(8t³L²/3G²)(λ Σh² + 2λ³/3)` reported as `eps2`, plus the tails at `p = 1`.
pub fn randomized_trotter_bound(
    spec: &HamiltonianSpec,
    t: f64,
    gates: f64,
) -> Result<BoundBreakdown> {
    if spec.len() < 3 {
        return Err(Error::TooFewTerms {
            required: 3,
            found: spec.len(),
        });
    }
    check_time_gates(t, gates)?;
    let h = spec.magnitudes();
    let l = h.len() as f64;
    let lambda = s1(&h);
    let sum_sq = compensated_sum(&h.iter().map(|x| x * x).collect::<Vec<_>>());
    let eps2 = 8.0 * t.powi(3) * l * l / (3.0 * gates * gates)
        * (lambda * sum_sq + 2.0 * lambda.powi(3) / 3.0);
    let ones = vec![1.0; h.len()];
    let (eps31, eps32) = tails(&h, &ones, &h, lambda, l, t, gates);
    Ok(BoundBreakdown::from_parts(
        BoundMethod::RandomizedTrotter,
        0.0,
        eps2,
        eps31,
        eps32,
        BoundInputs {
            t,
            gates,
            n_terms: h.len(),
            lambda,
            mu: l,
        },
    ))
}

/// qDRIFT: `4λ²t²/G`.
pub fn qdrift_bound(spec: &HamiltonianSpec, t: f64, gates: f64) -> Result<BoundBreakdown> {
    check_time_gates(t, gates)?;
    let lambda = spec.lambda();
    Ok(BoundBreakdown::total_only(
        BoundMethod::Qdrift,
        4.0 * lambda * lambda * t * t / gates,
        BoundInputs {
            t,
            gates,
            n_terms: spec.len(),
            lambda,
            mu: 1.0,
        },
    ))
}

/// Deterministic first-order Trotter with `G = rL`: `Lλ²t²/(2G)`.
pub fn trotter1_bound(spec: &HamiltonianSpec, t: f64, gates: f64) -> Result<BoundBreakdown> {
    check_time_gates(t, gates)?;
    let lambda = spec.lambda();
    let l = spec.len() as f64;
    Ok(BoundBreakdown::total_only(
        BoundMethod::Trotter1,
        l * lambda * lambda * t * t / (2.0 * gates),
        BoundInputs {
            t,
            gates,
            n_terms: spec.len(),
            lambda,
            mu: l,
        },
    ))
}

/// `Σ_{j<k<l} (‖[P_l,[P_j,P_k]]‖ + ‖[[P_k,P_l],P_j]‖) h_j h_k h_l` in the
/// spec's term order, which must be the order gates are applied in.
pub fn nested_commutator_sum(spec: &HamiltonianSpec) -> Result<f64> {
    let l = spec.len();
    if l > COMMUTATOR_LIMIT {
        return Err(Error::SizeGuard {
            what: "terms for commutator refinement",
            value: l,
            limit: COMMUTATOR_LIMIT,
        });
    }
    let terms = spec.terms();
    let mut acc = Accumulator::default();
    for j in 0..l {
        for k in j + 1..l {
            for m in k + 1..l {
                let (pj, pk, pm) = (&terms[j].pauli, &terms[k].pauli, &terms[m].pauli);
                // [[P_k, P_m], P_j] = -[P_j, [P_k, P_m]]; norms agree.
                let norms = nested_commutator_norm(pm, pj, pk) + nested_commutator_norm(pj, pk, pm);
                if norms != 0.0 {
                    acc.add(
                        norms * terms[j].magnitude() * terms[k].magnitude() * terms[m].magnitude(),
                    );
                }
            }
        }
    }
    Ok(acc.value())
}

/// [`complete_bound`] with `(16t³μ²/9G²) S(h,h,h)` replaced by
/// `(8t³μ²/9G²) Σ_{j<k<l} (‖[P_l,[P_j,P_k]]‖ + ‖[[P_k,P_l],P_j]‖) h_j h_k h_l`.
pub fn commutator_refined_eps2(
    spec: &HamiltonianSpec,
    p: &ProbabilityAssignment,
    t: f64,
    gates: f64,
) -> Result<BoundBreakdown> {
    let base = complete_bound(spec, p, t, gates)?;
    let h = spec.magnitudes();
    let mu = base.inputs.mu;
    let g2 = gates * gates;
    let t3 = t.powi(3);
    let unrefined = 16.0 * t3 * mu * mu / (9.0 * g2) * s3_aaa(&h);
    let refined = 8.0 * t3 * mu * mu / (9.0 * g2) * nested_commutator_sum(spec)?;
    // Recompute the commutator-free part rather than subtracting, to avoid
    // cancellation when the triple-sum term dominates.
    let d = DerivedVectors::new(&h, p.p());
    let eps2 = 4.0 * t3 * mu * mu / (3.0 * g2) * (s1(&d.v) + s2(&d.w, &h)?) + refined;
    debug_assert!(refined <= unrefined * (1.0 + 1e-12));
    Ok(BoundBreakdown::from_parts(
        BoundMethod::CompleteCommutator,
        base.eps1,
        eps2,
        base.eps31,
        base.eps32,
        base.inputs,
    ))
}
