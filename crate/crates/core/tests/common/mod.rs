#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sparsto::bounds::{AnsatzTag, ProbabilityAssignment};
use sparsto::{HamTerm, HamiltonianSpec, PauliString};

pub type CMatrix = DMatrix<Complex64>;

/// Random spec on `n` qubits with `l` distinct labels, scaled so that `λ = lambda`.
pub fn random_spec(rng: &mut ChaCha8Rng, n: usize, l: usize, lambda: f64) -> HamiltonianSpec {
    let codes = index::sample(rng, (1usize << (2 * n)) - 1, l);
    let raw: Vec<f64> = (0..l).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let terms = codes
        .into_iter()
        .zip(raw)
        .map(|(code, mag)| {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            HamTerm::new(
                sign * mag * lambda / total,
                PauliString::from_code(code as u64 + 1, n),
            )
        })
        .collect();
    HamiltonianSpec::new(n, terms, "random").unwrap()
}

pub fn random_probabilities(rng: &mut ChaCha8Rng, l: usize, min: f64) -> ProbabilityAssignment {
    let p = (0..l)
        .map(|_| {
            if rng.gen_bool(0.2) {
                1.0
            } else {
                rng.gen_range(min..1.0)
            }
        })
        .collect();
    ProbabilityAssignment::new(p, 0, AnsatzTag::Custom).unwrap()
}

fn single(c: char) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match c {
        'I' => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!(),
    }
}

/// Kronecker product of 2×2 Pauli matrices, leftmost character first.
pub fn dense_pauli(label: &str) -> CMatrix {
    label
        .chars()
        .fold(CMatrix::identity(1, 1), |acc, c| acc.kronecker(&single(c)))
}

/// `ρ ↦ -i[H, ρ]` on column-major vectorization.
pub fn dense_liouvillian(h: &CMatrix) -> CMatrix {
    let d = h.nrows();
    let id = CMatrix::identity(d, d);
    (id.kronecker(h) - h.transpose().kronecker(&id)) * Complex64::new(0.0, -1.0)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Prints one acceptance line straight to stderr so it shows without `--nocapture`.
pub fn report(name: &str, pass: bool, detail: &str) -> bool {
    use std::io::Write;
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "acceptance [{tag}] {name}: {detail}");
    pass
}
