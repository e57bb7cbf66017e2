use gossip_eigen::linalg::{cholesky, norm, Matrix};
use gossip_eigen::model::{population_model, weighted_model, Scheduler};
use gossip_eigen::oja::{init_states, StateMatrix};
use gossip_eigen::orth::{
    averaging_round_bound, averaging_rounds, centralized_orth, finalize_orth, run_asynch_orth,
    run_averaging, AvgState, NodeOrthState,
};
use gossip_eigen::params::averaging_lambda2;
use gossip_eigen::rng::SimRng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn averaging_conserves_mean_and_shrinks_error(
        seed in any::<u64>(),
        init in prop::collection::vec(-100.0f64..100.0, 4..20),
    ) {
        let n = init.len() - init.len() % 2;
        let init = init[..n].to_vec();
        let (m, _) = weighted_model(n, 2.0, 1.0).unwrap();
        let mut state = AvgState::new(init);
        let total: f64 = state.x0.iter().sum();
        let scale = state.x0.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        let mut rng = SimRng::from_seed(seed);
        let mut sched = Scheduler::new(&m, &mut rng);
        let mut err = state.squared_error();
        for _ in 0..300 {
            averaging_rounds(&mut state, &mut sched, 1);
            let s: f64 = state.y.iter().sum();
            prop_assert!((s - total).abs() <= 1e-9 * scale);
            let now = state.squared_error();
            prop_assert!(now <= err + 1e-12 * (1.0 + err));
            err = now;
        }
    }

    #[test]
    fn leading_columns_depend_only_on_leading_inputs(seed in any::<u64>(), n in 4usize..12, k in 2usize..4) {
        let q = init_states(n, k, &mut SimRng::from_seed(seed)).unwrap();
        let full = centralized_orth(q.matrix()).unwrap();
        let part = centralized_orth(&q.matrix().leading_columns(k - 1)).unwrap();
        for u in 0..n {
            for j in 0..k - 1 {
                prop_assert_eq!(full[(u, j)].to_bits(), part[(u, j)].to_bits());
            }
        }
    }

    #[test]
    fn exact_averages_reproduce_centralized_rows(seed in any::<u64>(), n in 3usize..20, k in 1usize..4) {
        prop_assume!(k <= n);
        let q = init_states(n, k, &mut SimRng::from_seed(seed)).unwrap();
        let reference = centralized_orth(q.matrix()).unwrap();
        let exact = q.matrix().gram().scaled(1.0 / n as f64);
        for u in 0..n {
            let mut node = NodeOrthState::from_table(&exact);
            finalize_orth(&mut node, q.row(u), n);
            prop_assert!(!node.failed);
            let d: Vec<f64> = node.vhat.iter().zip(reference.row(u)).map(|(a, b)| a - b).collect();
            prop_assert!(norm(&d) <= 1e-10);
        }
    }

    #[test]
    fn centralized_orth_is_orthonormal_with_same_span(seed in any::<u64>()) {
        let q = init_states(8, 3, &mut SimRng::from_seed(seed)).unwrap();
        let v = centralized_orth(q.matrix()).unwrap();
        prop_assert!(v.gram().sub(&Matrix::identity(3)).frobenius_norm() <= 1e-10);
        let l = cholesky(&q.matrix().gram()).unwrap();
        prop_assert!(v.matmul(&l.transpose()).sub(q.matrix()).frobenius_norm() <= 1e-10);
    }
}

#[test]
fn initial_tables_average_to_the_gram_matrix() {
    let n = 9;
    let q = init_states(n, 3, &mut SimRng::from_seed(4)).unwrap();
    let g = q.matrix().gram();
    for i in 0..3 {
        for j in 0..3 {
            let mean: f64 = (0..n).map(|u| NodeOrthState::from_row(q.row(u)).r(i, j)).sum::<f64>() / n as f64;
            assert!((mean - g[(i, j)] / n as f64).abs() <= 1e-12);
        }
    }
}

#[test]
fn rank_one_output_has_unit_norm() {
    let n = 7;
    let q = init_states(n, 1, &mut SimRng::from_seed(2)).unwrap();
    let exact = q.matrix().gram().scaled(1.0 / n as f64);
    let mut total = 0.0;
    for u in 0..n {
        let mut node = NodeOrthState::from_table(&exact);
        finalize_orth(&mut node, q.row(u), n);
        total += node.vhat[0] * node.vhat[0];
    }
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn constant_values_never_move() {
    let m = population_model(6).unwrap();
    let out = run_averaging(&m, vec![2.5; 6], 1000, &mut SimRng::from_seed(0)).unwrap();
    assert_eq!(out.y, vec![2.5; 6]);
}

#[test]
fn gossip_orth_agrees_with_reference_on_weighted_model() {
    let (m, _) = weighted_model(40, 2.0, 1.0).unwrap();
    let rounds = averaging_round_bound(averaging_lambda2(&m).unwrap(), 1e-8, 0.1).unwrap();
    for seed in 0..5 {
        let mut rng = SimRng::from_seed(seed);
        let q: StateMatrix = init_states(40, 2, &mut rng).unwrap();
        let out = run_asynch_orth(&m, &q, rounds, &mut rng);
        assert_eq!(out.failures, 0);
        let reference = centralized_orth(q.matrix()).unwrap();
        for u in 0..40 {
            let d: Vec<f64> = out.vhat.row(u).iter().zip(reference.row(u)).map(|(a, b)| a - b).collect();
            assert!(norm(&d) <= 1e-2);
        }
    }
}

#[test]
fn too_few_rounds_can_fail_without_aborting() {
    let m = population_model(30).unwrap();
    let mut failures = 0;
    for seed in 0..20 {
        let mut rng = SimRng::from_seed(seed);
        let q = init_states(30, 3, &mut rng).unwrap();
        let out = run_asynch_orth(&m, &q, 0, &mut rng);
        for (u, node) in out.nodes.iter().enumerate() {
            if node.failed {
                assert!(out.vhat.row(u).iter().all(|&x| x == 0.0));
            }
        }
        assert_eq!(out.failures, out.nodes.iter().filter(|s| s.failed).count());
        failures += out.failures;
    }
    // Unaveraged tables are rank one; only rounding lets a few factor.
    assert!(failures > 20 * 30 / 2, "{failures}");
}
