use proptest::prelude::*;

use sparsto::hamiltonian::{
    lambda_norm, parse_hamiltonian, serialize_hamiltonian, sort_terms_desc,
};
use sparsto::{HamTerm, HamiltonianSpec, PauliString};

fn arb_spec() -> impl Strategy<Value = HamiltonianSpec> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let max = (1u64 << (2 * n)) - 1;
            (
                Just(n),
                proptest::collection::btree_set(1..=max, 1..=(max as usize).min(20)),
                proptest::collection::vec(prop_oneof![-10.0f64..-1e-6, 1e-6f64..10.0], 20),
            )
        })
        .prop_map(|(n, codes, coeffs)| {
            let terms = codes
                .into_iter()
                .zip(coeffs)
                .map(|(code, c)| HamTerm::new(c, PauliString::from_code(code, n)))
                .collect();
            HamiltonianSpec::new(n, terms, "proptest").unwrap()
        })
}

proptest! {
    #[test]
    fn serialize_parse_round_trip(spec in arb_spec()) {
        let parsed = parse_hamiltonian(serialize_hamiltonian(&spec).as_bytes()).unwrap();
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.spec, spec);
    }

    #[test]
    fn lambda_ignores_order_and_signs(spec in arb_spec(), flips in proptest::collection::vec(any::<bool>(), 20)) {
        let sorted = sort_terms_desc(&spec);
        prop_assert!(((lambda_norm(&sorted) - lambda_norm(&spec)) / lambda_norm(&spec)).abs() < 1e-15);
        let flipped = HamiltonianSpec::new(
            spec.n_qubits(),
            spec.terms()
                .iter()
                .zip(&flips)
                .map(|(t, &f)| HamTerm::new(if f { -t.coeff } else { t.coeff }, t.pauli.clone()))
                .collect(),
            "",
        )
        .unwrap();
        prop_assert_eq!(lambda_norm(&flipped), lambda_norm(&spec));
    }

    #[test]
    fn sorting_is_idempotent(spec in arb_spec()) {
        let once = sort_terms_desc(&spec);
        prop_assert!(once.is_sorted_desc());
        prop_assert_eq!(sort_terms_desc(&once), once);
    }
}

#[test]
fn two_term_document() {
    let doc = br#"{"format":"hamiltonian-terms-v1","n_qubits":2,"provenance":"x",
        "terms":[{"coeff":0.5,"pauli":"XZ"},{"coeff":-0.25,"pauli":"YI"}]}"#;
    let parsed = parse_hamiltonian(doc).unwrap();
    assert_eq!(parsed.spec.len(), 2);
    assert_eq!(parsed.spec.lambda(), 0.75);
}
