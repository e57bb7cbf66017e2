use gossip_eigen::linalg::sym_eigen;
use gossip_eigen::model::{graph_model, weighted_model};
use gossip_eigen::params::{
    averaging_lambda2, mixing_bound, raw_schedule, weighted_spectral_facts, ScheduleConstants,
    SpectralBounds,
};
use gossip_eigen::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn closed_form_matches_eigensolver(half in 2usize..30, q in 0.01f64..2.0, extra in 0.01f64..4.0) {
        let n = 2 * half;
        let p = q + extra;
        let f = weighted_spectral_facts(n, p, q).unwrap();
        let (m, _) = weighted_model(n, p, q).unwrap();
        let e = sym_eigen(&m.communication_matrix()).unwrap();
        prop_assert!((e.values[0] - f.lambda1).abs() <= 1e-9);
        prop_assert!((e.values[1] - f.lambda2).abs() <= 1e-9);
        for &v in &e.values[2..] {
            prop_assert!((v - f.lambda_tail).abs() <= 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn gap_and_rho_inequalities(half in 2usize..500, q in 0.001f64..10.0, extra in 0.001f64..10.0) {
        let n = 2 * half;
        let p = q + extra;
        let nf = n as f64;
        let f = weighted_spectral_facts(n, p, q).unwrap();
        prop_assert!(f.gap12 >= 4.0 * q / (nf * (p + q)) * (1.0 - 1e-12));
        prop_assert!(f.gap23 >= 2.0 * (p - q) / (nf * (p + q)) * (1.0 - 1e-12));
        prop_assert!(f.rho > 0.0 && f.rho <= 0.5);
        prop_assert!(f.lambda1 > f.lambda2 && f.lambda2 > f.lambda_tail);
    }

    #[test]
    fn doubling_c2_doubles_the_horizon(
        n in 1usize..10_000,
        k in 1usize..5,
        eps in 0.01f64..0.9,
        delta in 0.01f64..0.9,
        gap in 1e-4f64..1.0,
    ) {
        let b = SpectralBounds { lambda_sum: 1.0, gap, gamma_mix: 0.01 };
        let c = ScheduleConstants::default();
        let a = raw_schedule(n, &b, k, eps, delta, &c, 0.5).unwrap();
        let d = raw_schedule(n, &b, k, eps, delta, &ScheduleConstants { c2: 2.0 * c.c2, ..c }, 0.5).unwrap();
        prop_assert_eq!(d.t_oja, 2.0 * a.t_oja);
        prop_assert_eq!(d.eta, a.eta);
        prop_assert_eq!(d.t_orth, a.t_orth);
    }
}

#[test]
fn weighted_mixing_inequality() {
    for (n, p, q) in [(8, 2.0, 1.0), (30, 5.0, 1.0), (64, 1.0, 0.9), (100, 2.0, 1.0)] {
        let (m, _) = weighted_model(n, p, q).unwrap();
        let l2 = averaging_lambda2(&m).unwrap();
        assert!(l2 <= 1.0 - 2.0 * q / (n as f64 * (p + q)) + 1e-12, "n = {n}: {l2}");
        let gamma = mixing_bound(&m).unwrap();
        assert!(gamma > 0.0 && gamma <= 1.0 / n as f64);
    }
}

#[test]
fn disjoint_cliques_do_not_mix() {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for u in 0..4 {
            for v in (u + 1)..4 {
                edges.push((base + u, base + v));
            }
        }
    }
    let m = graph_model(8, &edges).unwrap();
    assert!(matches!(mixing_bound(&m), Err(Error::NoMixing { .. })));
}

#[test]
fn invalid_weighted_inputs() {
    assert!(weighted_spectral_facts(5, 2.0, 1.0).is_err());
    assert!(weighted_spectral_facts(2, 2.0, 1.0).is_err());
    assert!(weighted_spectral_facts(10, 1.0, 1.0).is_err());
    assert!(weighted_spectral_facts(10, 1.0, 0.0).is_err());
}
