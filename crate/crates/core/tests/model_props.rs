use gossip_eigen::linalg::{cholesky, sym_eigen, Matrix};
use gossip_eigen::model::{
    population_model, sbm_model, weighted_model, EventSource, GroundTruth, Scheduler,
};
use gossip_eigen::oja::init_states;
use gossip_eigen::rng::SimRng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weighted_model_invariants(half in 2usize..20, q in 0.01f64..5.0, extra in 0.01f64..5.0) {
        let n = 2 * half;
        let p = q + extra;
        let (m, truth) = weighted_model(n, p, q).unwrap();
        let total: f64 = m.support().map(|e| e.1).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!((m.degree().iter().sum::<f64>() - 2.0).abs() <= 1e-12);
        for u in 0..n {
            let d: f64 = (0..n).filter(|&v| v != u).map(|v| m.pair_prob(u, v)).sum();
            prop_assert!((d - m.degree()[u]).abs() <= 1e-12);
        }
        prop_assert_eq!(truth.chi.iter().filter(|&&c| c == 1).count(), n / 2);
        prop_assert!(m.support().all(|(_, w)| w >= 0.0));
    }

    #[test]
    fn weighted_second_eigenvector_is_the_indicator(half in 2usize..16, q in 0.05f64..2.0, extra in 0.05f64..2.0) {
        let n = 2 * half;
        let (m, truth) = weighted_model(n, q + extra, q).unwrap();
        let e = sym_eigen(&m.communication_matrix()).unwrap();
        let v2 = e.vector(1);
        let chi = truth.unit_vector();
        let dot: f64 = v2.iter().zip(&chi).map(|(a, b)| a * b).sum();
        prop_assert!((dot.abs() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn same_seed_same_events(seed in any::<u64>()) {
        let (m, _) = weighted_model(8, 2.0, 1.0).unwrap();
        let draw = |s| {
            let mut rng = SimRng::from_seed(s);
            let mut sched = Scheduler::new(&m, &mut rng);
            (0..200).map(|_| sched.next_event()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(seed), draw(seed));
    }
}

fn frequencies(m: &gossip_eigen::model::CommunicationModel, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = m.n();
    let mut counts = vec![vec![0.0; n]; n];
    let mut rng = SimRng::from_seed(seed);
    let mut sched = Scheduler::new(m, &mut rng);
    for _ in 0..samples {
        let ev = sched.next_event();
        assert!(ev.u < ev.v);
        counts[ev.u][ev.v] += 1.0;
    }
    counts
}

#[test]
fn population_sampler_passes_chi_square() {
    let m = population_model(4).unwrap();
    let samples = 60_000;
    let counts = frequencies(&m, samples, 17);
    let expected = samples as f64 / 6.0;
    let mut chi2 = 0.0;
    for u in 0..4 {
        for v in (u + 1)..4 {
            let c = counts[u][v];
            let sigma = (samples as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
            assert!((c - expected).abs() <= 4.0 * sigma, "pair ({u},{v}): {c}");
            chi2 += (c - expected).powi(2) / expected;
        }
    }
    // 5 degrees of freedom, upper 0.001 point.
    assert!(chi2 < 20.515, "chi2 = {chi2}");
}

#[test]
fn weighted_sampler_frequency() {
    let (m, _) = weighted_model(4, 2.0, 1.0).unwrap();
    let samples = 60_000;
    let counts = frequencies(&m, samples, 3);
    let sigma = (samples as f64 * 0.25 * 0.75).sqrt();
    assert!((counts[0][1] - 0.25 * samples as f64).abs() <= 4.0 * sigma);
}

#[test]
fn empirical_second_moment_matches_communication_matrix() {
    let (m, _) = weighted_model(6, 2.0, 1.0).unwrap();
    let n = 6;
    let samples = 100_000;
    let mut acc = Matrix::zeros(n, n);
    let mut rng = SimRng::from_seed(99);
    let mut sched = Scheduler::new(&m, &mut rng);
    for _ in 0..samples {
        let ev = sched.next_event();
        for a in [ev.u, ev.v] {
            for b in [ev.u, ev.v] {
                acc[(a, b)] += 1.0;
            }
        }
    }
    let expect = m.communication_matrix();
    for a in 0..n {
        for b in 0..n {
            // each entry is a mean of Bernoulli(p) indicators
            let p = expect[(a, b)];
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            let got = acc[(a, b)] / samples as f64;
            assert!((got - p).abs() <= 4.0 * sigma + 1e-12, "({a},{b}): {got} vs {p}");
        }
    }
}

#[test]
fn sbm_edge_count_matches_expectation() {
    let (n, p, q) = (100, 0.5, 0.25);
    let seeds = 200;
    let intra = 2.0 * (50.0 * 49.0 / 2.0);
    let inter = 50.0 * 50.0;
    let mean = p * intra + q * inter;
    assert_eq!(mean, 1850.0);
    let var = p * (1.0 - p) * intra + q * (1.0 - q) * inter;
    let mut total = 0.0;
    for seed in 0..seeds {
        let (m, truth, edges) = sbm_model(n, p, q, &mut SimRng::from_seed(seed)).unwrap();
        assert_eq!(m.support_len(), edges.len());
        assert_eq!(truth, GroundTruth::balanced(n));
        for &(u, v) in &edges {
            assert_eq!(m.pair_prob(u, v), 1.0 / edges.len() as f64);
        }
        total += edges.len() as f64;
    }
    let avg = total / seeds as f64;
    assert!((avg - mean).abs() <= 3.0 * (var / seeds as f64).sqrt(), "mean |E| = {avg}");
}

#[test]
fn sbm_near_complete_graph() {
    let (m, _, edges) = sbm_model(8, 1.0, 1.0 - 1e-12, &mut SimRng::from_seed(0)).unwrap();
    assert_eq!(edges.len(), 28);
    for (_, w) in m.support() {
        assert!((w - 1.0 / 28.0).abs() <= 1e-15);
    }
}

#[test]
fn gaussian_start_moments() {
    let q = init_states(1000, 100, &mut SimRng::from_seed(5)).unwrap();
    let xs = q.matrix().as_slice();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() <= 4.0 / n.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() <= 4.0 * (2.0 / n).sqrt(), "variance {var}");
}

#[test]
fn gaussian_start_has_full_rank() {
    for seed in 0..100 {
        let q = init_states(10, 3, &mut SimRng::from_seed(seed)).unwrap();
        let l = cholesky(&q.matrix().gram()).expect("rank deficient start");
        assert!((0..3).all(|i| l[(i, i)] > 1e-6));
    }
}
