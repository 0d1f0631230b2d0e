mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{max_abs, random_probabilities, random_spec};
use sparsto::ansatz::linear_ansatz_probs;
use sparsto::channel::{expected_step_exact, ideal_channel, schedule_channel};
use sparsto::hamiltonian::{sort_terms_desc, synth_power_law};
use sparsto::schedule::{
    compile_qdrift, compile_sparsto, compile_trotter1, read_schedule, step_duration_schedule,
    write_schedule, Direction,
};
use sparsto::{HamTerm, HamiltonianSpec, PauliString, ProbabilityAssignment};

proptest! {
    #[test]
    fn durations_cover_the_time(t in 1e-3f64..100.0, mu in 0.1f64..50.0, ratio in 1.0f64..500.0) {
        let g = mu * ratio;
        let d = step_duration_schedule(t, g, mu).unwrap();
        let total: f64 = d.iter().sum();
        prop_assert!(((total - t) / t).abs() <= 1e-12);
        prop_assert!(d.len() as f64 >= ratio.floor() && d.len() as f64 <= ratio.ceil());
        prop_assert!(d.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn same_inputs_same_bytes(seed in any::<u64>(), gates in 5.0f64..200.0) {
        let spec = sort_terms_desc(&synth_power_law(8, 1.2, 3, 1).unwrap());
        let p = linear_ansatz_probs(&spec, 2, 4.0).unwrap();
        let a = write_schedule(&compile_sparsto(&spec, &p, 1.5, gates, seed).unwrap());
        let b = write_schedule(&compile_sparsto(&spec, &p, 1.5, gates, seed).unwrap());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(write_schedule(&read_schedule(&a).unwrap()), a);
    }
}

#[test]
fn direction_is_a_permutation_of_one_gate_set() {
    let spec = sort_terms_desc(&synth_power_law(10, 1.0, 4, 2).unwrap());
    let p =
        ProbabilityAssignment::new(vec![0.6; 10], 0, sparsto::bounds::AnsatzTag::Custom).unwrap();
    let s = compile_sparsto(&spec, &p, 1.0, 600.0, 8).unwrap();
    let order = |label: &str| {
        spec.terms()
            .iter()
            .position(|t| t.pauli.label() == label)
            .unwrap()
    };
    for step in &s.repeats {
        let idx: Vec<usize> = step.gates.iter().map(|g| order(&g.pauli.label())).collect();
        match step.direction {
            Direction::Forward => assert!(idx.windows(2).all(|w| w[0] < w[1])),
            Direction::Reverse => assert!(idx.windows(2).all(|w| w[0] > w[1])),
        }
    }
}

#[test]
fn sampled_generator_is_unbiased() {
    let spec = sort_terms_desc(&synth_power_law(6, 1.0, 3, 4).unwrap());
    let p = ProbabilityAssignment::new(
        vec![1.0, 0.7, 0.5, 0.4, 0.3, 0.25],
        1,
        sparsto::bounds::AnsatzTag::Custom,
    )
    .unwrap();
    let repeats = 20_000.0;
    let duration = 0.01;
    let s = compile_sparsto(&spec, &p, duration * repeats, p.mu() * repeats, 21).unwrap();
    assert_eq!(s.repeats.len(), 20_000);
    for (j, term) in spec.terms().iter().enumerate() {
        let sum: f64 = s
            .repeats
            .iter()
            .flat_map(|r| r.gates.iter())
            .filter(|g| g.pauli == term.pauli)
            .map(|g| g.angle)
            .sum();
        let mean = sum / repeats;
        let target = duration * term.coeff;
        let pj = p.p()[j];
        let sd = (duration * term.coeff / pj).abs() * (pj * (1.0 - pj) / repeats).sqrt();
        assert!(
            (mean - target).abs() <= 4.0 * sd + 1e-12 * target.abs(),
            "term {j}: {mean} vs {target} (sd {sd})"
        );
    }
}

#[test]
fn qdrift_frequency_for_three_to_one() {
    let spec = HamiltonianSpec::new(
        1,
        vec![
            HamTerm::new(3.0, PauliString::parse("X").unwrap()),
            HamTerm::new(1.0, PauliString::parse("Z").unwrap()),
        ],
        "",
    )
    .unwrap();
    let n = 100_000;
    let s = compile_qdrift(&spec, 1.0, n, 4).unwrap();
    let x = s.repeats[0]
        .gates
        .iter()
        .filter(|g| g.pauli.label() == "X")
        .count() as f64
        / n as f64;
    let sd = (0.75f64 * 0.25 / n as f64).sqrt();
    assert!((x - 0.75).abs() <= 3.0 * sd);
    let mass: f64 = s.repeats[0].gates.iter().map(|g| g.angle.abs()).sum();
    assert!((mass - 4.0).abs() < 1e-9);
}

#[test]
fn trotter_schedule_matches_step_channel_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let spec = random_spec(&mut rng, 2, 4, 1.0);
    let sched = compile_trotter1(&spec, 0.8, 2).unwrap();
    let whole = schedule_channel(&sched).unwrap();
    let one = schedule_channel(&compile_trotter1(&spec, 0.4, 1).unwrap()).unwrap();
    assert!(max_abs(&(whole.matrix - one.after(&one).matrix)) < 1e-12);
}

#[test]
fn single_term_schedules_are_exact() {
    let spec = HamiltonianSpec::new(
        2,
        vec![HamTerm::new(-0.7, PauliString::parse("XY").unwrap())],
        "",
    )
    .unwrap();
    let ideal = ideal_channel(&spec, 1.1).unwrap();
    let tr = schedule_channel(&compile_trotter1(&spec, 1.1, 3).unwrap()).unwrap();
    let qd = schedule_channel(&compile_qdrift(&spec, 1.1, 5, 2).unwrap()).unwrap();
    let sp = schedule_channel(
        &compile_sparsto(&spec, &ProbabilityAssignment::all_ones(1), 1.1, 4.0, 2).unwrap(),
    )
    .unwrap();
    for ch in [tr, qd, sp] {
        assert!(max_abs(&(ch.matrix - &ideal.matrix)) < 1e-10);
    }
}

#[test]
fn sampled_steps_average_to_expected_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let spec = random_spec(&mut rng, 2, 3, 1.0);
    let p = random_probabilities(&mut rng, 3, 0.3);
    let s = 0.3;
    let exact = expected_step_exact(&spec, &p, s).unwrap();
    let sched = compile_sparsto(&spec, &p, s * 4000.0, p.mu() * 4000.0, 6).unwrap();
    let mut sum = common::CMatrix::zeros(16, 16);
    for step in &sched.repeats {
        let one = sparsto::schedule::GateSchedule {
            repeats: vec![step.clone()],
            ..sched.clone()
        };
        sum += schedule_channel(&one).unwrap().matrix;
    }
    let mean = sum / num_complex::Complex64::new(sched.repeats.len() as f64, 0.0);
    assert!(max_abs(&(mean - exact.matrix)) < 0.05);
}
