//! Dense channel simulation for small systems.
//!
//! Density operators are vectorized column-major, so `ρ ↦ AρB` is the
//! superoperator `Bᵀ ⊗ A` and a unitary channel is `conj(U) ⊗ U`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{complete_bound, ProbabilityAssignment};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::pauli::{Pauli, PauliString};
use crate::schedule::{draw_step, step_duration_schedule, Direction, GateSchedule};

pub type CMatrix = DMatrix<Complex64>;

/// Largest qubit count for explicit Pauli matrices.
pub const PAULI_MATRIX_QUBIT_LIMIT: usize = 12;
/// Largest qubit count for superoperators.
pub const SUPEROPERATOR_QUBIT_LIMIT: usize = 6;
/// Largest term count for `2^L` enumeration.
pub const ENUMERATION_TERM_LIMIT: usize = 12;

const MC_CHUNK: usize = 256;
const ENUMERATION_CHUNK: usize = 64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Operator on the `2^n`-dimensional state space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub n_qubits: usize,
    pub matrix: CMatrix,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Linear map on column-major vectorized `2^n × 2^n` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    pub n_qubits: usize,
    pub matrix: CMatrix,
}

impl SuperOperator {
    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << (2 * n_qubits);
        SuperOperator {
            n_qubits,
            matrix: CMatrix::identity(d, d),
        }
    }

    /// `conj(U) ⊗ U`.
    pub fn from_unitary(u: &DenseOperator) -> Self {
        SuperOperator {
            n_qubits: u.n_qubits,
            matrix: u.matrix.conjugate().kronecker(&u.matrix),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &SuperOperator) -> SuperOperator {
        SuperOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &first.matrix,
        }
    }

    pub fn power(&self, mut k: usize) -> SuperOperator {
        let mut result = CMatrix::identity(self.dim(), self.dim());
        let mut base = self.matrix.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        SuperOperator {
            n_qubits: self.n_qubits,
            matrix: result,
        }
    }

    /// Applies the map to a `2^n × 2^n` operator.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let v = CMatrix::from_column_slice(d * d, 1, rho.as_slice());
        let out = &self.matrix * v;
        CMatrix::from_column_slice(d, d, out.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    ChoiTraceDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelErrorReport {
    pub metric: ErrorMetric,
    pub value: f64,
    pub bound_total: f64,
    /// 0 for exact enumeration.
    pub samples: usize,
    pub standard_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct MonteCarloStep {
    pub mean: SuperOperator,
    /// Largest entrywise standard error of the mean.
    pub standard_error: f64,
    pub samples: usize,
}

fn guard(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        return Err(Error::SizeGuard { what, value, limit });
    }
    Ok(())
}

/// Tensor product of single-qubit Paulis, leftmost label character on the
/// most significant qubit.
pub fn pauli_to_matrix(pauli: &PauliString) -> Result<DenseOperator> {
    let n = pauli.n_qubits();
    guard("n_qubits", n, PAULI_MATRIX_QUBIT_LIMIT)?;
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        let mut row = col;
        let mut phase = ONE;
        for (pos, op) in pauli.ops().iter().enumerate() {
            let bit = n - 1 - pos;
            let x = (col >> bit) & 1;
            match op {
                Pauli::I => {}
                Pauli::X => row ^= 1 << bit,
                Pauli::Y => {
                    row ^= 1 << bit;
                    phase *= if x == 0 { I } else { -I };
                }
                Pauli::Z => {
                    if x == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        m[(row, col)] = phase;
    }
    Ok(DenseOperator {
        n_qubits: n,
        matrix: m,
    })
}

/// `exp(-i·angle·P) = cos(angle) I − i sin(angle) P`.
fn rotation(p: &CMatrix, angle: f64) -> CMatrix {
    let d = p.nrows();
    CMatrix::identity(d, d) * Complex64::new(angle.cos(), 0.0)
        - p * Complex64::new(0.0, angle.sin())
}

pub fn hamiltonian_matrix(spec: &HamiltonianSpec) -> Result<DenseOperator> {
    guard("n_qubits", spec.n_qubits(), PAULI_MATRIX_QUBIT_LIMIT)?;
    let d = 1usize << spec.n_qubits();
    let mut h = CMatrix::zeros(d, d);
    for term in spec.terms() {
        h += pauli_to_matrix(&term.pauli)?.matrix * Complex64::new(term.coeff, 0.0);
    }
    Ok(DenseOperator {
        n_qubits: spec.n_qubits(),
        matrix: h,
    })
}

/// `exp(-iHt)` through the Hermitian eigendecomposition of `H`.
pub fn evolution_unitary(spec: &HamiltonianSpec, t: f64) -> Result<DenseOperator> {
    let h = hamiltonian_matrix(spec)?;
    let eig = SymmetricEigen::new(h.matrix);
    let phases = eig.eigenvalues.map(|e| Complex64::new(0.0, -e * t).exp());
    let v = &eig.eigenvectors;
    let u = v * CMatrix::from_diagonal(&phases) * v.adjoint();
    Ok(DenseOperator {
        n_qubits: spec.n_qubits(),
        matrix: u,
    })
}

pub fn ideal_channel(spec: &HamiltonianSpec, t: f64) -> Result<SuperOperator> {
    guard("n_qubits", spec.n_qubits(), SUPEROPERATOR_QUBIT_LIMIT)?;
    Ok(SuperOperator::from_unitary(&evolution_unitary(spec, t)?))
}

/// The schedule is deterministic, so its channel is a single unitary conjugation.
pub fn schedule_channel(schedule: &GateSchedule) -> Result<SuperOperator> {
    let n = schedule.n_qubits;
    guard("n_qubits", n, SUPEROPERATOR_QUBIT_LIMIT)?;
    let d = 1usize << n;
    let mut u = CMatrix::identity(d, d);
    for step in &schedule.repeats {
        for gate in &step.gates {
            if gate.pauli.n_qubits() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: gate.pauli.n_qubits(),
                });
            }
            let p = pauli_to_matrix(&gate.pauli)?.matrix;
            u = rotation(&p, gate.angle) * u;
        }
    }
    Ok(SuperOperator::from_unitary(&DenseOperator {
        n_qubits: n,
        matrix: u,
    }))
}

struct StepKernel {
    n_qubits: usize,
    gates: Vec<CMatrix>,
}

impl StepKernel {
    fn new(spec: &HamiltonianSpec, assignment: &ProbabilityAssignment, s: f64) -> Result<Self> {
        guard("n_qubits", spec.n_qubits(), SUPEROPERATOR_QUBIT_LIMIT)?;
        assignment.check_against(spec)?;
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step duration must be finite, got {s}"
            )));
        }
        let gates = spec
            .terms()
            .iter()
            .zip(assignment.p())
            .map(|(term, &p)| {
                Ok(rotation(
                    &pauli_to_matrix(&term.pauli)?.matrix,
                    s * term.coeff / p,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(StepKernel {
            n_qubits: spec.n_qubits(),
            gates,
        })
    }

    fn unitary(&self, included: &[usize], direction: Direction) -> CMatrix {
        let d = 1usize << self.n_qubits;
        let mut u = CMatrix::identity(d, d);
        let mut apply = |j: usize| u = &self.gates[j] * &u;
        match direction {
            Direction::Forward => included.iter().copied().for_each(&mut apply),
            Direction::Reverse => included.iter().rev().copied().for_each(&mut apply),
        }
        u
    }

    fn channel(&self, included: &[usize], direction: Direction) -> CMatrix {
        let u = self.unitary(included, direction);
        u.conjugate().kronecker(&u)
    }

    fn symmetric_channel(&self, included: &[usize]) -> CMatrix {
        (self.channel(included, Direction::Forward) + self.channel(included, Direction::Reverse))
            * Complex64::new(0.5, 0.0)
    }
}

/// `E[Ê_s]` by enumerating all `2^L` inclusion patterns, each contributing the
/// average of its forward and reverse products.
pub fn expected_step_exact(
    spec: &HamiltonianSpec,
    assignment: &ProbabilityAssignment,
    s: f64,
) -> Result<SuperOperator> {
    guard("n_terms", spec.len(), ENUMERATION_TERM_LIMIT)?;
    let kernel = StepKernel::new(spec, assignment, s)?;
    let p = assignment.p();
    let l = p.len();
    let dim = 1usize << (2 * spec.n_qubits());
    let outcomes = 1usize << l;
    let partials: Vec<CMatrix> = (0..outcomes.div_ceil(ENUMERATION_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = CMatrix::zeros(dim, dim);
            let end = ((chunk + 1) * ENUMERATION_CHUNK).min(outcomes);
            let mut included = Vec::with_capacity(l);
            for mask in chunk * ENUMERATION_CHUNK..end {
                included.clear();
                let mut weight = 1.0;
                for (j, &pj) in p.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        weight *= pj;
                        included.push(j);
                    } else {
                        weight *= 1.0 - pj;
                    }
                }
                if weight > 0.0 {
                    acc += kernel.symmetric_channel(&included) * Complex64::new(weight, 0.0);
                }
            }
            acc
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for part in partials {
        total += part;
    }
    Ok(SuperOperator {
        n_qubits: spec.n_qubits(),
        matrix: total,
    })
}

/// Monte Carlo estimate of `E[Ê_s]` over inclusion patterns; each sample is
/// the forward/reverse average for the pattern the compiler draws on stream
/// `i` of `seed`.
pub fn expected_step_mc(
    spec: &HamiltonianSpec,
    assignment: &ProbabilityAssignment,
    s: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloStep> {
    expected_step_mc_streams(spec, assignment, s, samples, seed, 0)
}

fn expected_step_mc_streams(
    spec: &HamiltonianSpec,
    assignment: &ProbabilityAssignment,
    s: f64,
    samples: usize,
    seed: u64,
    first_stream: u64,
) -> Result<MonteCarloStep> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least 2 samples, got {samples}"
        )));
    }
    let kernel = StepKernel::new(spec, assignment, s)?;
    let p = assignment.p();
    let dim = 1usize << (2 * spec.n_qubits());
    let partials: Vec<Moments> = (0..samples.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = Moments::new(dim);
            for i in chunk * MC_CHUNK..((chunk + 1) * MC_CHUNK).min(samples) {
                let (_, included) = draw_step(p, seed, first_stream + i as u64);
                acc.push(&kernel.symmetric_channel(&included));
            }
            acc
        })
        .collect();
    let total = partials
        .into_iter()
        .reduce(Moments::merge)
        .expect("at least one chunk");
    let n = samples as f64;
    let standard_error = total
        .m2
        .iter()
        .map(|&m2| (m2 / (n - 1.0) / n).sqrt())
        .fold(0.0, f64::max);
    let mean = total.mean;
    Ok(MonteCarloStep {
        mean: SuperOperator {
            n_qubits: spec.n_qubits(),
            matrix: mean,
        },
        standard_error,
        samples,
    })
}

/// Entrywise running mean and sum of squared deviations (Welford), merged
/// pairwise in chunk order.
struct Moments {
    count: f64,
    mean: CMatrix,
    m2: DMatrix<f64>,
}

impl Moments {
    fn new(dim: usize) -> Self {
        Moments {
            count: 0.0,
            mean: CMatrix::zeros(dim, dim),
            m2: DMatrix::zeros(dim, dim),
        }
    }

    fn push(&mut self, x: &CMatrix) {
        self.count += 1.0;
        let delta = x - &self.mean;
        self.mean += &delta / Complex64::new(self.count, 0.0);
        let after = x - &self.mean;
        self.m2 += delta.zip_map(&after, |d, a| (d.conj() * a).re);
    }

    fn merge(self, other: Moments) -> Moments {
        let count = self.count + other.count;
        let delta = &other.mean - &self.mean;
        let mean = &self.mean + &delta * Complex64::new(other.count / count, 0.0);
        let m2 =
            self.m2 + other.m2 + delta.map(|d| d.norm_sqr() * self.count * other.count / count);
        Moments { count, mean, m2 }
    }
}

/// Choi matrix `(1/d) Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)` of a superoperator.
pub fn choi_matrix(op: &CMatrix) -> CMatrix {
    let dd = op.nrows();
    let d = (dd as f64).sqrt().round() as usize;
    let scale = Complex64::new(1.0 / d as f64, 0.0);
    CMatrix::from_fn(dd, dd, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        op[(k + l * d, i + j * d)] * scale
    })
}

/// Trace norm of the difference of normalized Choi states; a lower bound on
/// the diamond distance.
pub fn choi_trace_distance(a: &SuperOperator, b: &SuperOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::LengthMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = choi_matrix(&(&a.matrix - &b.matrix));
    Ok(diff.singular_values().iter().sum())
}

/// Channel error of the sparsified schedule for `(t, G)` against `exp(-iHt)`,
/// using `E[Ê_s]^k` composed with the expected remainder step.
pub fn empirical_error(
    spec: &HamiltonianSpec,
    assignment: &ProbabilityAssignment,
    t: f64,
    gates: f64,
    mode: SimulationMode,
) -> Result<ChannelErrorReport> {
    guard("n_qubits", spec.n_qubits(), SUPEROPERATOR_QUBIT_LIMIT)?;
    let durations = step_duration_schedule(t, gates, assignment.mu())?;
    let s = durations[0];
    let full = durations.iter().take_while(|&&d| d == s).count();
    let rest = durations.get(full).copied();

    let (channel, samples, standard_error) = match mode {
        SimulationMode::Exact => {
            let step = expected_step_exact(spec, assignment, s)?.power(full);
            let channel = match rest {
                Some(r) => expected_step_exact(spec, assignment, r)?.after(&step),
                None => step,
            };
            (channel, 0, 0.0)
        }
        SimulationMode::MonteCarlo { samples, seed } => {
            let main = expected_step_mc_streams(spec, assignment, s, samples, seed, 0)?;
            let mut se = main.standard_error;
            let step = main.mean.power(full);
            let channel = match rest {
                Some(r) => {
                    let last = expected_step_mc_streams(
                        spec,
                        assignment,
                        r,
                        samples,
                        seed,
                        samples as u64,
                    )?;
                    se = se.max(last.standard_error);
                    last.mean.after(&step)
                }
                None => step,
            };
            (channel, samples, se)
        }
    };
    let ideal = ideal_channel(spec, t)?;
    let value = choi_trace_distance(&channel, &ideal)?;
    let bound = complete_bound(spec, assignment, t, gates)?;
    Ok(ChannelErrorReport {
        metric: ErrorMetric::ChoiTraceDistance,
        value,
        bound_total: bound.total,
        samples,
        standard_error,
    })
}

/// `-i(I ⊗ H − Hᵀ ⊗ I)`, the generator of `ρ ↦ e^{-iHs} ρ e^{iHs}`.
pub fn liouvillian(h: &DenseOperator) -> SuperOperator {
    let d = h.dim();
    let id = CMatrix::identity(d, d);
    let m = (id.kronecker(&h.matrix) - h.matrix.transpose().kronecker(&id)) * (-I);
    SuperOperator {
        n_qubits: h.n_qubits,
        matrix: m,
    }
}

/// Liouvillians of the individual terms `coeff_j P_j`, in spec order.
pub fn term_liouvillians(spec: &HamiltonianSpec) -> Result<Vec<SuperOperator>> {
    guard("n_qubits", spec.n_qubits(), SUPEROPERATOR_QUBIT_LIMIT)?;
    spec.terms()
        .iter()
        .map(|term| {
            let p = pauli_to_matrix(&term.pauli)?;
            Ok(liouvillian(&DenseOperator {
                n_qubits: p.n_qubits,
                matrix: p.matrix * Complex64::new(term.coeff, 0.0),
            }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamTerm;
    use crate::schedule::compile_trotter1;

    fn spec(terms: &[(f64, &str)]) -> HamiltonianSpec {
        let n = terms[0].1.len();
        HamiltonianSpec::new(
            n,
            terms
                .iter()
                .map(|&(c, l)| HamTerm::new(c, PauliString::parse(l).unwrap()))
                .collect(),
            "",
        )
        .unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pauli_matrices() {
        let z = pauli_to_matrix(&PauliString::parse("Z").unwrap())
            .unwrap()
            .matrix;
        assert_eq!(
            z,
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE]))
        );
        let xx = pauli_to_matrix(&PauliString::parse("XX").unwrap())
            .unwrap()
            .matrix;
        assert_eq!(xx[(3, 0)], ONE);
        let y = pauli_to_matrix(&PauliString::parse("Y").unwrap())
            .unwrap()
            .matrix;
        assert_eq!(y[(1, 0)], I);
        assert_eq!(y[(0, 1)], -I);
        let xi = pauli_to_matrix(&PauliString::parse("XI").unwrap())
            .unwrap()
            .matrix;
        assert_eq!(xi[(2, 0)], ONE);
        for label in ["XYZ", "YYI", "ZXY"] {
            let m = pauli_to_matrix(&PauliString::parse(label).unwrap())
                .unwrap()
                .matrix;
            assert!(max_abs(&(&m * &m - CMatrix::identity(8, 8))) < 1e-15);
        }
    }

    #[test]
    fn pauli_matrix_size_guard() {
        let big = PauliString::parse(&"Z".repeat(13)).unwrap();
        assert!(matches!(
            pauli_to_matrix(&big),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn ideal_channel_basics() {
        let h = spec(&[(0.7, "XZ"), (-0.4, "YY"), (0.2, "ZI")]);
        let id = ideal_channel(&h, 0.0).unwrap();
        assert!(max_abs(&(id.matrix - CMatrix::identity(16, 16))) < 1e-12);
        let a = ideal_channel(&h, 0.3).unwrap();
        let b = ideal_channel(&h, 0.5).unwrap();
        let c = ideal_channel(&h, 0.8).unwrap();
        assert!(max_abs(&(a.after(&b).matrix - c.matrix)) < 1e-10);
        let u = evolution_unitary(&h, 0.8).unwrap().matrix;
        assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(4, 4))) < 1e-10);
    }

    #[test]
    fn single_term_rotation() {
        let h = spec(&[(0.3, "Y")]);
        let u = evolution_unitary(&h, 2.0).unwrap().matrix;
        let p = pauli_to_matrix(&PauliString::parse("Y").unwrap())
            .unwrap()
            .matrix;
        assert!(max_abs(&(u - rotation(&p, 0.6))) < 1e-12);
    }

    #[test]
    fn commuting_trotter_is_exact() {
        let h = spec(&[(0.9, "ZI"), (-0.4, "IZ")]);
        let sched = compile_trotter1(&h, 1.3, 1).unwrap();
        let a = schedule_channel(&sched).unwrap();
        let b = ideal_channel(&h, 1.3).unwrap();
        assert!(max_abs(&(a.matrix - b.matrix)) < 1e-10);
    }

    #[test]
    fn choi_distance_examples() {
        let id = SuperOperator::identity(1);
        assert_eq!(choi_trace_distance(&id, &id).unwrap(), 0.0);
        let phase = DenseOperator {
            n_qubits: 1,
            matrix: CMatrix::identity(2, 2) * Complex64::new(0.0, 1.0).exp(),
        };
        assert!(choi_trace_distance(&id, &SuperOperator::from_unitary(&phase)).unwrap() < 1e-14);
        let x = pauli_to_matrix(&PauliString::parse("X").unwrap()).unwrap();
        let d = choi_trace_distance(&id, &SuperOperator::from_unitary(&x)).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        assert!(choi_trace_distance(&id, &SuperOperator::identity(2)).is_err());
    }

    #[test]
    fn expected_step_edge_cases() {
        let h = spec(&[(0.6, "XY"), (0.3, "ZZ"), (0.1, "YI")]);
        let p =
            ProbabilityAssignment::new(vec![1.0, 0.5, 0.2], 1, crate::bounds::AnsatzTag::Custom)
                .unwrap();
        let e0 = expected_step_exact(&h, &p, 0.0).unwrap();
        assert!(max_abs(&(e0.matrix - CMatrix::identity(16, 16))) < 1e-12);

        let ones = ProbabilityAssignment::all_ones(3);
        let e = expected_step_exact(&h, &ones, 0.2).unwrap();
        let kernel = StepKernel::new(&h, &ones, 0.2).unwrap();
        assert!(max_abs(&(e.matrix - kernel.symmetric_channel(&[0, 1, 2]))) < 1e-14);
        let mc = expected_step_mc(&h, &ones, 0.2, 16, 1).unwrap();
        assert!(mc.standard_error < 1e-7);
    }

    #[test]
    fn mc_rejects_single_sample() {
        let h = spec(&[(0.6, "X")]);
        assert!(expected_step_mc(&h, &ProbabilityAssignment::all_ones(1), 0.1, 1, 0).is_err());
    }

    #[test]
    fn commuting_all_ones_has_zero_error() {
        let h = spec(&[(0.9, "ZI"), (-0.4, "IZ"), (0.3, "ZZ")]);
        let r = empirical_error(
            &h,
            &ProbabilityAssignment::all_ones(3),
            1.0,
            6.0,
            SimulationMode::Exact,
        )
        .unwrap();
        assert!(r.value < 1e-10);
        assert!(r.bound_total > 0.0);
        assert_eq!(r.samples, 0);
        assert_eq!(r.standard_error, 0.0);
    }

    #[test]
    fn liouvillian_generates_conjugation() {
        let h = spec(&[(0.5, "X"), (0.2, "Z")]);
        let l = liouvillian(&hamiltonian_matrix(&h).unwrap());
        let s = 1e-4;
        let fd = (ideal_channel(&h, s).unwrap().matrix - ideal_channel(&h, -s).unwrap().matrix)
            / Complex64::new(2.0 * s, 0.0);
        assert!(max_abs(&(fd - l.matrix)) < 1e-7);
    }
}
