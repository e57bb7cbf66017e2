//! Gossip averaging and distributed Cholesky orthogonalization.
//!
//! Each node starts with the products `r^(i,j) = q^(i) q^(j)` of its own row,
//! averages them pairwise with whoever the scheduler pairs it with, and after
//! the horizon scales by `n` to get a local copy of `QᵀQ`. Its output row is
//! its own `q` row times `(Lᵀ)⁻¹` for the local Cholesky factor `L`.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, solve_transposed_lower, Matrix};
use crate::model::{CommunicationModel, EventSource, Scheduler};
use crate::oja::StateMatrix;
use crate::rng::SimRng;

/// Scalar gossip averaging state.
#[derive(Clone, Debug, PartialEq)]
pub struct AvgState {
    pub y: Vec<f64>,
    pub x0: Vec<f64>,
}

impl AvgState {
    pub fn new(init: Vec<f64>) -> Self {
        Self {
            y: init.clone(),
            x0: init,
        }
    }

    pub fn target(&self) -> f64 {
        self.x0.iter().sum::<f64>() / self.x0.len() as f64
    }

    /// `Σ (y_u − x_avg)²`.
    pub fn squared_error(&self) -> f64 {
        let avg = self.target();
        self.y.iter().map(|y| (y - avg) * (y - avg)).sum()
    }

    /// `Σ (x_u − x_avg)²`.
    pub fn initial_squared_error(&self) -> f64 {
        let avg = self.target();
        self.x0.iter().map(|x| (x - avg) * (x - avg)).sum()
    }
}

#[inline]
pub fn avg_step(yu: f64, yv: f64) -> (f64, f64) {
    let m = (yu + yv) / 2.0;
    (m, m)
}

/// Runs `rounds` averaging interactions from `source`.
pub fn averaging_rounds<S: EventSource>(state: &mut AvgState, source: &mut S, rounds: u64) {
    for _ in 0..rounds {
        let ev = source.next_event();
        let (a, b) = avg_step(state.y[ev.u], state.y[ev.v]);
        state.y[ev.u] = a;
        state.y[ev.v] = b;
    }
}

pub fn run_averaging(
    model: &CommunicationModel,
    init: Vec<f64>,
    rounds: u64,
    rng: &mut SimRng,
) -> Result<AvgState> {
    if init.len() != model.n() {
        return Err(Error::InvalidInput(format!(
            "{} initial values for {} nodes",
            init.len(),
            model.n()
        )));
    }
    let mut state = AvgState::new(init);
    let mut scheduler = Scheduler::new(model, rng);
    averaging_rounds(&mut state, &mut scheduler, rounds);
    Ok(state)
}

/// Rounds after which averaging has relative squared error `≤ eps` with
/// probability `≥ 1 − delta`: `ceil(ln(1/(eps·delta)) / ln(1/λ₂))`, where
/// `λ₂` is the second eigenvalue of `I − D/2 + W/2`.
pub fn averaging_round_bound(lambda2: f64, eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameters(format!(
            "need eps in (0,1) and delta in (0,1], got {eps}, {delta}"
        )));
    }
    if !(lambda2 < 1.0) {
        return Err(Error::NoMixing { lambda2 });
    }
    if lambda2 <= 0.0 {
        return Ok(1);
    }
    Ok(((1.0 / (eps * delta)).ln() / (1.0 / lambda2).ln()).ceil().max(1.0) as u64)
}

/// Per-node state of the orthogonalization protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeOrthState {
    k: usize,
    /// Upper triangle of `r`, row-major: (0,0), (0,1), …, (0,k−1), (1,1), …
    r: Vec<f64>,
    pub vhat: Vec<f64>,
    pub failed: bool,
}

#[inline]
fn packed_len(k: usize) -> usize {
    k * (k + 1) / 2
}

impl NodeOrthState {
    /// `r^(i,j) = q^(i) · q^(j)` for `i ≤ j`.
    pub fn from_row(q: &[f64]) -> Self {
        let k = q.len();
        let mut r = Vec::with_capacity(packed_len(k));
        for i in 0..k {
            for j in i..k {
                r.push(q[i] * q[j]);
            }
        }
        Self {
            k,
            r,
            vhat: vec![0.0; k],
            failed: false,
        }
    }

    /// Node state with an explicit symmetric `r` table.
    pub fn from_table(r: &Matrix) -> Self {
        let k = r.rows();
        let mut packed = Vec::with_capacity(packed_len(k));
        for i in 0..k {
            for j in i..k {
                packed.push(r[(i, j)]);
            }
        }
        Self {
            k,
            r: packed,
            vhat: vec![0.0; k],
            failed: false,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.r[packed_index(self.k, i.min(j), i.max(j))]
    }

    /// `R_u = n · r_u`, symmetrized.
    pub fn scaled_table(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(self.k, self.k);
        let scale = n as f64;
        for i in 0..self.k {
            for j in i..self.k {
                let x = scale * self.r[packed_index(self.k, i, j)];
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }
}

#[inline]
fn packed_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < k);
    i * k - i * (i + 1) / 2 + j
}

/// Pairwise averaging of every stored `r` entry.
pub fn orth_avg_step(a: &mut NodeOrthState, b: &mut NodeOrthState) {
    debug_assert_eq!(a.k, b.k);
    for (x, y) in a.r.iter_mut().zip(b.r.iter_mut()) {
        let (m, _) = avg_step(*x, *y);
        *x = m;
        *y = m;
    }
}

/// Local finalization: Cholesky of `n · r_u`, then solve for the output row.
///
/// A non-positive-definite local table marks the node failed with a zero row.
pub fn finalize_orth(node: &mut NodeOrthState, q_row: &[f64], n: usize) {
    let local = node.scaled_table(n);
    let solved = cholesky(&local).and_then(|l| solve_transposed_lower(q_row, &l));
    match solved {
        Ok(v) if v.iter().all(|x| x.is_finite()) => {
            node.vhat = v;
            node.failed = false;
        }
        _ => {
            node.vhat = vec![0.0; node.k];
            node.failed = true;
        }
    }
}

fn pair_mut<T>(items: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = items.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = items.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Outcome of the distributed orthogonalization.
#[derive(Clone, Debug)]
pub struct OrthOutcome {
    /// Assembled output rows, `n × k` (zero rows for failed nodes).
    pub vhat: Matrix,
    pub failures: usize,
    pub nodes: Vec<NodeOrthState>,
}

/// Averages for `rounds` interactions from `source`, then finalizes every node.
pub fn orth_rounds<S: EventSource>(q: &StateMatrix, source: &mut S, rounds: u64) -> OrthOutcome {
    let n = q.n();
    let mut nodes: Vec<NodeOrthState> = (0..n).map(|u| NodeOrthState::from_row(q.row(u))).collect();
    for _ in 0..rounds {
        let ev = source.next_event();
        let (a, b) = pair_mut(&mut nodes, ev.u, ev.v);
        orth_avg_step(a, b);
    }
    let mut vhat = Matrix::zeros(n, q.k());
    let mut failures = 0;
    for (u, node) in nodes.iter_mut().enumerate() {
        finalize_orth(node, q.row(u), n);
        failures += node.failed as usize;
        vhat.row_mut(u).copy_from_slice(&node.vhat);
    }
    OrthOutcome {
        vhat,
        failures,
        nodes,
    }
}

pub fn run_asynch_orth(
    model: &CommunicationModel,
    q: &StateMatrix,
    rounds: u64,
    rng: &mut SimRng,
) -> OrthOutcome {
    let mut scheduler = Scheduler::new(model, rng);
    orth_rounds(q, &mut scheduler, rounds)
}

/// Centralized reference: `L = chol(QᵀQ)`, `Ṽ = Q (Lᵀ)⁻¹`.
pub fn centralized_orth(q: &Matrix) -> Result<Matrix> {
    let l = cholesky(&q.gram())?;
    let mut out = Matrix::zeros(q.rows(), q.cols());
    for u in 0..q.rows() {
        let row = solve_transposed_lower(q.row(u), &l)?;
        out.row_mut(u).copy_from_slice(&row);
    }
    Ok(out)
}
