use graphverify::distinguish::{qsd_bounds, trace_distance};
use graphverify::graphstate::{build_graph_state, stabilizer_generator, syndrome_state, Graph, StabilizerTableau};
use graphverify::mbqc::execute::{correct_byproduct, execute};
use graphverify::mbqc::{compile, random_circuit, WireInput};
use graphverify::qcore::random::{haar_state, random_density};
use graphverify::qcore::PauliString;
use graphverify::stabtest::{decompose, exact_pass_probability, pass_probability_by_sum};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, seed: u64) -> Graph {
    Graph::random(n, 0.5, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn graph_state_is_stabilized(n in 1usize..=7, seed in any::<u64>()) {
        let g = graph(n, seed);
        let psi = build_graph_state(&g).unwrap();
        let tableau = StabilizerTableau::from_graph(&g);
        for j in 0..n {
            let k = stabilizer_generator(&g, j).unwrap();
            prop_assert!((k.expectation(&psi).unwrap() - 1.0).abs() < 1e-10);
            prop_assert_eq!(tableau.expectation(&k).unwrap(), 1.0);
        }
    }

    #[test]
    fn syndrome_states_are_orthonormal(n in 1usize..=5, seed in any::<u64>(), a in any::<u32>(), b in any::<u32>()) {
        let g = graph(n, seed);
        let bits = |x: u32| (0..n).map(|i| x >> i & 1 == 1).collect::<Vec<_>>();
        let (ua, ub) = (bits(a), bits(b));
        let sa = syndrome_state(&g, &ua).unwrap();
        let sb = syndrome_state(&g, &ub).unwrap();
        let overlap = sa.inner(&sb).norm();
        let want = if ua == ub { 1.0 } else { 0.0 };
        prop_assert!((overlap - want).abs() < 1e-10);
    }

    #[test]
    fn pass_probability_routes_agree(n in 2usize..=6, seed in any::<u64>(), mask in 1u32..64) {
        let g = graph(n, seed);
        let v1: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        prop_assume!(!v1.is_empty());
        let d = decompose(&g, &v1).unwrap();
        let psi = haar_state(n, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let projector = exact_pass_probability(&psi, &d).unwrap();
        let summed = pass_probability_by_sum(&psi, &d).unwrap();
        prop_assert!((projector - summed).abs() < 1e-10);
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&projector));
    }

    #[test]
    fn trace_distance_is_a_metric(n in 1usize..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_density(n, &mut rng), random_density(n, &mut rng), random_density(n, &mut rng));
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-10);
    }

    #[test]
    fn sampled_mbqc_runs_are_correct(m in 1usize..=3, depth in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(m, depth, WireInput::Zero, &mut rng);
        let p = compile(&c).unwrap();
        let e = execute(&p, &mut rng).unwrap();
        let fixed = correct_byproduct(&e.output, &e.byproduct).unwrap();
        prop_assert!(fixed.equal_up_to_phase(&c.ideal_output().unwrap(), 1e-9));
    }

    #[test]
    fn guaranteed_gap_is_conservative(eps in 1e-5f64..0.0155, r in 3u32..8) {
        // the guaranteed gap is positive only for ε < 1/64
        let b = qsd_bounds(eps, r).unwrap();
        prop_assert!(b.gap() >= b.guaranteed_gap - 1e-12);
        prop_assert!(b.alpha > b.beta());
    }
}

#[test]
fn pauli_string_identity_has_unit_expectation() {
    let psi = haar_state(3, &mut ChaCha8Rng::seed_from_u64(0));
    assert!((PauliString::identity(3).expectation(&psi).unwrap() - 1.0).abs() < 1e-12);
}
