use std::io::Cursor;

use gossip_eigen::io::{read_event_log, write_event_log};
use gossip_eigen::model::{
    population_model, weighted_model, EventSource, Replay, ScheduleEvent, Scheduler,
};
use gossip_eigen::oja::{
    centralized_oja, init_states, oja_rounds, oja_step, run_asynch_oja, OjaSchedule,
};
use gossip_eigen::rng::SimRng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gossip_equals_centralized(
        seed in any::<u64>(),
        half in 2usize..8,
        k in 1usize..4,
        eta in 0.001f64..0.2,
        rounds in 0u64..2000,
    ) {
        let n = 2 * half;
        let (m, _) = weighted_model(n, 3.0, 1.0).unwrap();
        let sched = OjaSchedule { k, eta, t_oja: rounds, t_orth: 0 };
        let (out, log) = run_asynch_oja(&m, &sched, &mut SimRng::from_seed(seed)).unwrap();
        prop_assert_eq!(log.len() as u64, rounds);
        let q0 = init_states(n, k, &mut SimRng::from_seed(seed)).unwrap();
        let central = centralized_oja(&q0, log.iter().map(|e| e.to_vector(n)), eta);
        prop_assert_eq!(out, central);
    }

    #[test]
    fn step_touches_only_the_pair(seed in any::<u64>(), u in 0usize..6, d in 1usize..6, eta in 0.0f64..1.0) {
        let v = (u + d) % 6;
        let mut rng = SimRng::from_seed(seed);
        let before = init_states(6, 3, &mut rng).unwrap();
        let mut after = before.clone();
        oja_step(&mut after, ScheduleEvent { u: u.min(v), v: u.max(v), t: 0 }, eta);
        for w in (0..6).filter(|&w| w != u && w != v) {
            prop_assert!(before.row(w).iter().zip(after.row(w)).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
        for j in 0..3 {
            let s = before.row(u)[j] + before.row(v)[j];
            prop_assert_eq!(after.row(u)[j], before.row(u)[j] + eta * s);
            prop_assert_eq!(after.row(v)[j], before.row(v)[j] + eta * s);
        }
    }
}

#[test]
fn norm_growth_is_bounded() {
    let m = population_model(10).unwrap();
    let eta = 0.05;
    let mut rng = SimRng::from_seed(1);
    let mut state = init_states(10, 2, &mut rng).unwrap();
    let mut sched = Scheduler::new(&m, &mut rng);
    let mut prev = state.matrix().frobenius_norm();
    for _ in 0..5000 {
        let ev = sched.next_event();
        oja_step(&mut state, ev, eta);
        let now = state.matrix().frobenius_norm();
        assert!(now >= prev * (1.0 - 1e-15));
        assert!(now <= (1.0 + 2.0 * eta) * prev * (1.0 + 1e-15));
        prev = now;
    }
}

#[test]
fn zero_rounds_returns_the_start() {
    let m = population_model(5).unwrap();
    let sched = OjaSchedule { k: 2, eta: 0.1, t_oja: 0, t_orth: 0 };
    let (out, log) = run_asynch_oja(&m, &sched, &mut SimRng::from_seed(8)).unwrap();
    assert!(log.is_empty());
    assert_eq!(out, init_states(5, 2, &mut SimRng::from_seed(8)).unwrap());
}

#[test]
fn replayed_log_file_reproduces_the_run() {
    let (m, _) = weighted_model(8, 2.0, 1.0).unwrap();
    let sched = OjaSchedule { k: 2, eta: 0.02, t_oja: 3000, t_orth: 0 };
    let (out, log) = run_asynch_oja(&m, &sched, &mut SimRng::from_seed(21)).unwrap();
    let mut buf = Vec::new();
    write_event_log(&mut buf, &log).unwrap();
    let events = read_event_log(Cursor::new(buf)).unwrap();
    assert_eq!(events, log);
    let mut state = init_states(8, 2, &mut SimRng::from_seed(21)).unwrap();
    oja_rounds(&mut state, &mut Replay::new(events), 3000, 0.02, f64::MAX, None).unwrap();
    assert_eq!(state, out);
}
