//! Oja's iteration, centralized and as a gossip protocol.
//!
//! Node `u` holds row `u` of the iterate `Q_t`. When the scheduler picks
//! `(u, v)`, applying `(I + η e_{u,v} e_{u,v}ᵀ)` only touches rows `u` and `v`:
//! both become `q + η (q_u + q_v)`. The centralized routine performs the same
//! floating point operations in the same order, so replaying the event log
//! through it reproduces the gossip run bit for bit.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{CommunicationModel, EventSource, ScheduleEvent, Scheduler};
use crate::rng::SimRng;

/// Magnitude above which a trial is aborted instead of drifting to infinity.
///
/// Used by the trial harness. [`run_asynch_oja`] itself only stops on
/// non-finite values so it stays an exact simulation for any step size.
pub const OVERFLOW_LIMIT: f64 = 1e12;

/// Per-node rows of the Oja iterate, `n × k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateMatrix {
    q: Matrix,
}

impl StateMatrix {
    pub fn from_matrix(q: Matrix) -> Self {
        Self { q }
    }

    pub fn n(&self) -> usize {
        self.q.rows()
    }

    pub fn k(&self) -> usize {
        self.q.cols()
    }

    pub fn row(&self, u: usize) -> &[f64] {
        self.q.row(u)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    pub fn into_matrix(self) -> Matrix {
        self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OjaSchedule {
    pub k: usize,
    pub eta: f64,
    pub t_oja: u64,
    pub t_orth: u64,
}

impl OjaSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameters("k must be at least 1".into()));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameters(format!("eta must be positive, got {}", self.eta)));
        }
        Ok(())
    }
}

/// I.i.d. standard normal `n × k` start, filled row by row.
pub fn init_states(n: usize, k: usize, rng: &mut SimRng) -> Result<StateMatrix> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameters(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let data = (0..n * k).map(|_| rng.standard_normal()).collect();
    Ok(StateMatrix {
        q: Matrix::from_row_major(n, k, data)?,
    })
}

/// One interaction: rows `u` and `v` both read the old pair, then both write.
pub fn oja_step(state: &mut StateMatrix, ev: ScheduleEvent, eta: f64) {
    let (qu, qv) = state.q.two_rows_mut(ev.u, ev.v);
    for (a, b) in qu.iter_mut().zip(qv.iter_mut()) {
        let s = *a + *b;
        *a += eta * s;
        *b += eta * s;
    }
}

fn check_rows(state: &StateMatrix, ev: ScheduleEvent, limit: f64) -> Result<()> {
    for &x in state.row(ev.u).iter().chain(state.row(ev.v)) {
        if !(x.abs() <= limit) {
            return Err(Error::StepSizeTooLarge {
                round: ev.t,
                value: x.abs(),
            });
        }
    }
    Ok(())
}

/// Runs `rounds` Oja interactions from `source` on `state`.
///
/// Fails with [`Error::StepSizeTooLarge`] once a touched entry exceeds
/// `limit` in magnitude (or stops being finite). When `log` is given every
/// consumed event is appended to it.
pub fn oja_rounds<S: EventSource>(
    state: &mut StateMatrix,
    source: &mut S,
    rounds: u64,
    eta: f64,
    limit: f64,
    mut log: Option<&mut Vec<ScheduleEvent>>,
) -> Result<()> {
    for _ in 0..rounds {
        let ev = source.next_event();
        oja_step(state, ev, eta);
        check_rows(state, ev, limit)?;
        if let Some(log) = log.as_deref_mut() {
            log.push(ev);
        }
    }
    Ok(())
}

/// Gossip Oja for `schedule.t_oja` rounds from a fresh Gaussian start.
///
/// Returns the pre-orthogonalization iterate and the event log.
pub fn run_asynch_oja(
    model: &CommunicationModel,
    schedule: &OjaSchedule,
    rng: &mut SimRng,
) -> Result<(StateMatrix, Vec<ScheduleEvent>)> {
    schedule.validate()?;
    let mut state = init_states(model.n(), schedule.k, rng)?;
    let mut log = Vec::with_capacity(schedule.t_oja.min(1 << 24) as usize);
    let mut scheduler = Scheduler::new(model, rng);
    oja_rounds(&mut state, &mut scheduler, schedule.t_oja, schedule.eta, f64::MAX, Some(&mut log))?;
    Ok((state, log))
}

/// Centralized Oja: `Q ← (I + η x xᵀ) Q` for each sample `x`, no
/// orthogonalization.
///
/// Zero entries of `x` are skipped, which makes a sample `e_u + e_v` cost the
/// same operations as [`oja_step`].
pub fn centralized_oja<I, X>(q0: &StateMatrix, xs: I, eta: f64) -> StateMatrix
where
    I: IntoIterator<Item = X>,
    X: AsRef<[f64]>,
{
    let mut q = q0.q.clone();
    let k = q.cols();
    let mut support: Vec<(usize, f64)> = Vec::new();
    let mut proj = vec![0.0; k];
    for x in xs {
        let x = x.as_ref();
        assert_eq!(x.len(), q.rows(), "sample dimension mismatch");
        support.clear();
        support.extend(x.iter().copied().enumerate().filter(|&(_, w)| w != 0.0));
        if support.is_empty() {
            continue;
        }
        // proj = xᵀ Q
        for (i, p) in proj.iter_mut().enumerate() {
            let mut acc = support[0].1 * q[(support[0].0, i)];
            for &(w, xw) in &support[1..] {
                acc += xw * q[(w, i)];
            }
            *p = acc;
        }
        for &(w, xw) in &support {
            for (i, &p) in proj.iter().enumerate() {
                q[(w, i)] += eta * xw * p;
            }
        }
    }
    StateMatrix { q }
}
