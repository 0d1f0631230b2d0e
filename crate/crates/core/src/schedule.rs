//! Gate schedules for stochastic sparsification, qDRIFT and deterministic
//! first-order Trotter, plus the line-delimited `gate-schedule-v1` format.
//!
//! Randomness contract for sparsified schedules: one root seed; repeat `k`
//! draws from the ChaCha8 stream `k` of that seed. Within a repeat the first
//! draw picks the direction and then one uniform draw per term, in ascending
//! term order, decides inclusion. A term with `p_j = 1` still consumes its
//! draw, so the draw sequence does not depend on the probabilities.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ProbabilityAssignment;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::pauli::PauliString;

pub const SCHEDULE_FORMAT: &str = "gate-schedule-v1";

/// Relative slack when deciding that `G/μ` is an integer.
const INTEGER_RATIO_TOL: f64 = 1e-9;

/// `exp(-i · angle · pauli)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub pauli: PauliString,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

/// One repeat. Gates are listed in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterStep {
    #[serde(rename = "repeat")]
    pub repeat_index: usize,
    pub duration: f64,
    pub direction: Direction,
    pub gates: Vec<GateOp>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMethod {
    Sparsto,
    Qdrift,
    Trotter1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSchedule {
    pub n_qubits: usize,
    pub method: ScheduleMethod,
    pub seed: u64,
    pub t: f64,
    pub expected_gates: f64,
    pub repeats: Vec<TrotterStep>,
}

impl GateSchedule {
    pub fn gate_count(&self) -> usize {
        self.repeats.iter().map(|r| r.gates.len()).sum()
    }

    pub fn total_duration(&self) -> f64 {
        self.repeats.iter().map(|r| r.duration).sum()
    }
}

/// Durations of the repeats for budget `G` at `μ` gates per step: `⌊G/μ⌋`
/// steps of `μt/G` and, when positive, one final step covering the rest of `t`.
pub fn step_duration_schedule(t: f64, gates: f64, mu: f64) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be positive, got {t}"
        )));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mu must be positive, got {mu}"
        )));
    }
    let ratio = gates / mu;
    let nearest = ratio.round();
    let (full, step) = if nearest >= 1.0 && (ratio - nearest).abs() <= INTEGER_RATIO_TOL * ratio {
        (nearest as usize, t / nearest)
    } else if ratio >= 1.0 {
        (ratio.floor() as usize, t / ratio)
    } else {
        return Err(Error::InvalidArgument(format!(
            "gate budget {gates} is below mu = {mu}"
        )));
    };
    let mut durations = vec![step; full];
    let rest = t - full as f64 * step;
    if rest > 1e-12 * t {
        durations.push(rest);
    }
    Ok(durations)
}

/// Draws one sparsified step: `(direction, included term indices ascending)`.
pub(crate) fn draw_step(p: &[f64], seed: u64, stream: u64) -> (Direction, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let direction = if rng.gen::<bool>() {
        Direction::Reverse
    } else {
        Direction::Forward
    };
    let included = p
        .iter()
        .enumerate()
        .filter_map(|(j, &pj)| {
            let u: f64 = rng.gen();
            (pj >= 1.0 || u < pj).then_some(j)
        })
        .collect();
    (direction, included)
}

/// Sparsified randomized first-order Trotter. Term order of `spec_sorted` is
/// the forward gate order; included term `j` becomes
/// `exp(-i · duration · coeff_j / p_j · P_j)`.
pub fn compile_sparsto(
    spec_sorted: &HamiltonianSpec,
    assignment: &ProbabilityAssignment,
    t: f64,
    gates: f64,
    seed: u64,
) -> Result<GateSchedule> {
    if assignment.len() != spec_sorted.len() {
        return Err(Error::LengthMismatch {
            expected: spec_sorted.len(),
            found: assignment.len(),
        });
    }
    let durations = step_duration_schedule(t, gates, assignment.mu())?;
    let terms = spec_sorted.terms();
    let p = assignment.p();
    let repeats = durations
        .par_iter()
        .enumerate()
        .map(|(k, &duration)| {
            let (direction, mut included) = draw_step(p, seed, k as u64);
            if direction == Direction::Reverse {
                included.reverse();
            }
            let gates = included
                .into_iter()
                .map(|j| GateOp {
                    pauli: terms[j].pauli.clone(),
                    angle: duration * terms[j].coeff / p[j],
                })
                .collect();
            TrotterStep {
                repeat_index: k,
                duration,
                direction,
                gates,
            }
        })
        .collect();
    Ok(GateSchedule {
        n_qubits: spec_sorted.n_qubits(),
        method: ScheduleMethod::Sparsto,
        seed,
        t,
        expected_gates: gates,
        repeats,
    })
}

/// qDRIFT: `G` gates, each picking term `j` with probability `|coeff_j|/λ`
/// and angle `sign(coeff_j) · λt/G`. All gates live in one repeat of duration `t`.
pub fn compile_qdrift(
    spec: &HamiltonianSpec,
    t: f64,
    gates: u64,
    seed: u64,
) -> Result<GateSchedule> {
    if gates == 0 {
        return Err(Error::InvalidArgument(
            "qDRIFT needs at least one gate".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be positive, got {t}"
        )));
    }
    let lambda = spec.lambda();
    let tau = lambda * t / gates as f64;
    let weights =
        WeightedIndex::new(spec.magnitudes()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = spec.terms();
    let ops = (0..gates)
        .map(|_| {
            let j = weights.sample(&mut rng);
            GateOp {
                pauli: terms[j].pauli.clone(),
                angle: terms[j].coeff.signum() * tau,
            }
        })
        .collect();
    Ok(GateSchedule {
        n_qubits: spec.n_qubits(),
        method: ScheduleMethod::Qdrift,
        seed,
        t,
        expected_gates: gates as f64,
        repeats: vec![TrotterStep {
            repeat_index: 0,
            duration: t,
            direction: Direction::Forward,
            gates: ops,
        }],
    })
}

/// `r` identical forward steps of duration `t/r` over all terms.
pub fn compile_trotter1(spec: &HamiltonianSpec, t: f64, r: usize) -> Result<GateSchedule> {
    if r == 0 {
        return Err(Error::InvalidArgument(
            "Trotter repeat count must be positive".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be positive, got {t}"
        )));
    }
    let s = t / r as f64;
    let gates: Vec<GateOp> = spec
        .terms()
        .iter()
        .map(|term| GateOp {
            pauli: term.pauli.clone(),
            angle: s * term.coeff,
        })
        .collect();
    let repeats = (0..r)
        .map(|k| TrotterStep {
            repeat_index: k,
            duration: s,
            direction: Direction::Forward,
            gates: gates.clone(),
        })
        .collect();
    Ok(GateSchedule {
        n_qubits: spec.n_qubits(),
        method: ScheduleMethod::Trotter1,
        seed: 0,
        t,
        expected_gates: (r * spec.len()) as f64,
        repeats,
    })
}

#[derive(Serialize, Deserialize)]
struct ScheduleHeader {
    format: String,
    n_qubits: usize,
    method: ScheduleMethod,
    seed: u64,
    t: f64,
    expected_gates: f64,
}

/// Serializes to `gate-schedule-v1`: a header line, then one JSON line per repeat.
pub fn write_schedule(schedule: &GateSchedule) -> String {
    let header = ScheduleHeader {
        format: SCHEDULE_FORMAT.to_owned(),
        n_qubits: schedule.n_qubits,
        method: schedule.method,
        seed: schedule.seed,
        t: schedule.t,
        expected_gates: schedule.expected_gates,
    };
    let mut out = serde_json::to_string(&header).expect("plain data serializes");
    out.push('\n');
    for step in &schedule.repeats {
        out.push_str(&serde_json::to_string(step).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

/// Parses a `gate-schedule-v1` document.
pub fn read_schedule(document: &str) -> Result<GateSchedule> {
    let mut lines = document.lines().filter(|l| !l.trim().is_empty());
    let header: ScheduleHeader = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty schedule document".into()))?,
    )?;
    if header.format != SCHEDULE_FORMAT {
        return Err(Error::FormatTag {
            expected: SCHEDULE_FORMAT,
            found: header.format,
        });
    }
    let repeats = lines
        .map(|l| serde_json::from_str::<TrotterStep>(l).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;
    for step in &repeats {
        if let Some(g) = step
            .gates
            .iter()
            .find(|g| g.pauli.n_qubits() != header.n_qubits)
        {
            return Err(Error::InvalidPauli {
                label: g.pauli.label(),
                reason: format!("schedule has n_qubits = {}", header.n_qubits),
            });
        }
    }
    Ok(GateSchedule {
        n_qubits: header.n_qubits,
        method: header.method,
        seed: header.seed,
        t: header.t,
        expected_gates: header.expected_gates,
        repeats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::AnsatzTag;
    use crate::hamiltonian::{sort_terms_desc, synth_power_law, HamTerm};

    #[test]
    fn durations_integer_ratio() {
        let d = step_duration_schedule(1.0, 10.0, 2.0).unwrap();
        assert_eq!(d, vec![0.2; 5]);
    }

    #[test]
    fn durations_with_remainder() {
        let d = step_duration_schedule(1.0, 10.0, 3.0).unwrap();
        assert_eq!(d.len(), 4);
        for &x in &d[..3] {
            assert!((x - 0.3).abs() < 1e-15);
        }
        assert!((d[3] - 0.1).abs() < 1e-15);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn durations_single_step_and_errors() {
        assert_eq!(step_duration_schedule(1.0, 2.5, 2.5).unwrap(), vec![1.0]);
        assert!(step_duration_schedule(1.0, 2.0, 2.5).is_err());
        assert!(step_duration_schedule(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn all_ones_reproduces_trotter1_forward_steps() {
        let spec = sort_terms_desc(&synth_power_law(5, 1.0, 3, 4).unwrap());
        let ones = ProbabilityAssignment::all_ones(5);
        let s = compile_sparsto(&spec, &ones, 2.0, 40.0, 9).unwrap();
        let t1 = compile_trotter1(&spec, 2.0, 8).unwrap();
        assert_eq!(s.repeats.len(), 8);
        for (a, b) in s.repeats.iter().zip(&t1.repeats) {
            assert_eq!(a.gates.len(), 5);
            if a.direction == Direction::Forward {
                assert_eq!(a.gates, b.gates);
            } else {
                let mut rev = b.gates.clone();
                rev.reverse();
                assert_eq!(a.gates, rev);
            }
        }
        assert!(s.repeats.iter().any(|r| r.direction == Direction::Reverse));
    }

    #[test]
    fn tiny_probabilities_give_empty_steps() {
        let spec = sort_terms_desc(&synth_power_law(4, 1.0, 2, 1).unwrap());
        let p = ProbabilityAssignment::new(vec![1e-9; 4], 0, AnsatzTag::Custom).unwrap();
        let s = compile_sparsto(&spec, &p, 1.0, 1e-7, 3).unwrap();
        assert!(s.repeats.iter().filter(|r| r.gates.is_empty()).count() >= 20);
    }

    #[test]
    fn qdrift_single_term() {
        let spec = HamiltonianSpec::new(
            1,
            vec![HamTerm::new(-0.5, PauliString::parse("Y").unwrap())],
            "",
        )
        .unwrap();
        let s = compile_qdrift(&spec, 2.0, 7, 1).unwrap();
        assert_eq!(s.gate_count(), 7);
        assert!(s.repeats[0]
            .gates
            .iter()
            .all(|g| g.angle == -0.5 * 2.0 / 7.0));
        let mass: f64 = s.repeats[0].gates.iter().map(|g| g.angle.abs()).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trotter1_angles_scale_inverse_r() {
        let spec = synth_power_law(3, 1.0, 2, 5).unwrap();
        let a = compile_trotter1(&spec, 1.0, 1).unwrap();
        let b = compile_trotter1(&spec, 1.0, 4).unwrap();
        assert_eq!(a.repeats.len(), 1);
        assert_eq!(a.gate_count(), 3);
        assert_eq!(b.expected_gates, 12.0);
        for (x, y) in a.repeats[0].gates.iter().zip(&b.repeats[0].gates) {
            assert!((x.angle / y.angle - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_file_round_trip() {
        let spec = sort_terms_desc(&synth_power_law(6, 1.0, 3, 2).unwrap());
        let p =
            ProbabilityAssignment::new(vec![1.0, 0.8, 0.5, 0.5, 0.3, 0.2], 1, AnsatzTag::Custom)
                .unwrap();
        let s = compile_sparsto(&spec, &p, 1.0, 33.0, 17).unwrap();
        let text = write_schedule(&s);
        assert!(text.starts_with(
            r#"{"format":"gate-schedule-v1","n_qubits":3,"method":"sparsto","seed":17"#
        ));
        assert_eq!(read_schedule(&text).unwrap(), s);
        assert_eq!(
            write_schedule(&compile_sparsto(&spec, &p, 1.0, 33.0, 17).unwrap()),
            text
        );
    }
}
