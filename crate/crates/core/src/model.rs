//! Communication models and the random pair scheduler.
//!
//! A model is a probability distribution over unordered node pairs. Each
//! global round the scheduler draws one pair from it, independently of all
//! previous rounds. Nodes are indexed `0..n`; in the planted models the first
//! `n/2` indices form the first community.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::SimRng;

const SUM_TOL: f64 = 1e-12;

/// One scheduler draw: nodes `u < v` interact in global round `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleEvent {
    pub u: usize,
    pub v: usize,
    pub t: u64,
}

impl ScheduleEvent {
    /// Dense `e_u + e_v`.
    pub fn to_vector(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        x[self.u] = 1.0;
        x[self.v] = 1.0;
        x
    }
}

/// Planted partition as a ±1 indicator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub chi: Vec<i8>,
}

impl GroundTruth {
    /// First half `+1`, second half `-1`.
    pub fn balanced(n: usize) -> Self {
        Self {
            chi: (0..n).map(|u| if u < n / 2 { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    /// `χ/√n`.
    pub fn unit_vector(&self) -> Vec<f64> {
        let s = 1.0 / (self.chi.len() as f64).sqrt();
        self.chi.iter().map(|&c| c as f64 * s).collect()
    }
}

/// Pair-sampling law of the scheduler.
#[derive(Clone, Debug)]
pub struct CommunicationModel {
    n: usize,
    /// Pairs with positive probability, `u < v`, sorted lexicographically.
    pairs: Vec<(usize, usize)>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    degree: Vec<f64>,
}

impl CommunicationModel {
    /// Builds a model from unnormalized nonnegative pair weights.
    pub fn from_weights(n: usize, weighted: Vec<((usize, usize), f64)>) -> Result<Self> {
        let mut entries: Vec<((usize, usize), f64)> = Vec::with_capacity(weighted.len());
        for ((a, b), w) in weighted {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidInput(format!("bad pair ({a}, {b}) for n = {n}")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidInput(format!("bad weight {w} on ({a}, {b})")));
            }
            if w > 0.0 {
                entries.push(((a.min(b), a.max(b)), w));
            }
        }
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("duplicate pair".into()));
        }
        if entries.is_empty() {
            return Err(Error::DegenerateGraph);
        }
        let total = compensated_sum(entries.iter().map(|e| e.1));
        let pairs: Vec<(usize, usize)> = entries.iter().map(|e| e.0).collect();
        let probs: Vec<f64> = entries.iter().map(|e| e.1 / total).collect();

        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let mut degree = vec![0.0; n];
        for (&(u, v), &p) in pairs.iter().zip(&probs) {
            degree[u] += p;
            degree[v] += p;
        }
        debug_assert!((compensated_sum(probs.iter().copied()) - 1.0).abs() <= SUM_TOL);
        Ok(Self {
            n,
            pairs,
            probs,
            cumulative,
            degree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree vector, `D_uu = Σ_v pair_prob(u, v)`.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Pairs with positive probability and their probabilities.
    pub fn support(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn support_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair_prob(&self, u: usize, v: usize) -> f64 {
        let key = (u.min(v), u.max(v));
        match self.pairs.binary_search(&key) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    /// Draws the pair for round `t`: one uniform, binary search on the
    /// cumulative table.
    pub fn sample_event(&self, t: u64, rng: &mut SimRng) -> ScheduleEvent {
        let x = rng.uniform() * self.cumulative[self.cumulative.len() - 1];
        let i = self
            .cumulative
            .partition_point(|&c| c <= x)
            .min(self.pairs.len() - 1);
        let (u, v) = self.pairs[i];
        ScheduleEvent { u, v, t }
    }

    /// `D + W = Σ pair_prob(u,v) · e_{u,v} e_{u,v}ᵀ` as a dense matrix.
    pub fn communication_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (&(u, v), &p) in self.pairs.iter().zip(&self.probs) {
            m[(u, v)] += p;
            m[(v, u)] += p;
        }
        for u in 0..self.n {
            m[(u, u)] = self.degree[u];
        }
        m
    }

    /// `I − D/2 + W/2`, the expected one-round averaging operator.
    pub fn averaging_matrix(&self) -> Matrix {
        let mut m = Matrix::identity(self.n);
        for (&(u, v), &p) in self.pairs.iter().zip(&self.probs) {
            m[(u, v)] += 0.5 * p;
            m[(v, u)] += 0.5 * p;
        }
        for u in 0..self.n {
            m[(u, u)] -= 0.5 * self.degree[u];
        }
        m
    }
}

/// Neumaier summation; plain summation drifts past 1e-12 on large supports.
pub(crate) fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_planted(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidParameters(format!("n must be even and >= 4, got {n}")));
    }
    Ok(())
}

/// `(n, p, q)`-weighted model: weight `p` inside a community, `q` across.
pub fn weighted_model(n: usize, p: f64, q: f64) -> Result<(CommunicationModel, GroundTruth)> {
    check_planted(n)?;
    if !(q > 0.0) || !(p > q) || !p.is_finite() {
        return Err(Error::InvalidParameters(format!("need p > q > 0, got p = {p}, q = {q}")));
    }
    let truth = GroundTruth::balanced(n);
    let mut w = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            let same = truth.chi[u] == truth.chi[v];
            w.push(((u, v), if same { p } else { q }));
        }
    }
    Ok((CommunicationModel::from_weights(n, w)?, truth))
}

/// Stochastic block model graph, scheduled uniformly over its edges.
///
/// Pairs are visited in lexicographic order `(0,1), (0,2), …` and each
/// consumes one uniform draw; the pair is an edge when the draw is below `p`
/// (same community) or `q` (different communities).
pub fn sbm_model(
    n: usize,
    p: f64,
    q: f64,
    rng: &mut SimRng,
) -> Result<(CommunicationModel, GroundTruth, Vec<(usize, usize)>)> {
    check_planted(n)?;
    if !(q > 0.0) || !(p > q) || p > 1.0 {
        return Err(Error::InvalidParameters(format!(
            "need 0 < q < p <= 1, got p = {p}, q = {q}"
        )));
    }
    let truth = GroundTruth::balanced(n);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let prob = if truth.chi[u] == truth.chi[v] { p } else { q };
            if rng.uniform() < prob {
                edges.push((u, v));
            }
        }
    }
    let model = graph_model(n, &edges)?;
    Ok((model, truth, edges))
}

/// Uniform scheduler over all pairs (the classic population protocol).
pub fn population_model(n: usize) -> Result<CommunicationModel> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("population model needs n >= 2, got {n}")));
    }
    let mut w = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            w.push(((u, v), 1.0));
        }
    }
    CommunicationModel::from_weights(n, w)
}

/// Uniform scheduler over the edges of a simple graph on `n` nodes.
pub fn graph_model(n: usize, edges: &[(usize, usize)]) -> Result<CommunicationModel> {
    if edges.is_empty() {
        return Err(Error::DegenerateGraph);
    }
    CommunicationModel::from_weights(n, edges.iter().map(|&e| (e, 1.0)).collect())
}

/// Draws scheduler events and counts per-node interactions.
pub struct Scheduler<'a> {
    model: &'a CommunicationModel,
    rng: &'a mut SimRng,
    round: u64,
    contacts: Vec<u64>,
}

impl<'a> Scheduler<'a> {
    pub fn new(model: &'a CommunicationModel, rng: &'a mut SimRng) -> Self {
        Self {
            model,
            rng,
            round: 0,
            contacts: vec![0; model.n()],
        }
    }

    pub fn rounds(&self) -> u64 {
        self.round
    }

    /// Interactions per node so far (local rounds).
    pub fn contacts(&self) -> &[u64] {
        &self.contacts
    }
}

/// Anything that yields scheduler events: a live scheduler or a replayed log.
pub trait EventSource {
    fn next_event(&mut self) -> ScheduleEvent;
}

impl EventSource for Scheduler<'_> {
    fn next_event(&mut self) -> ScheduleEvent {
        let ev = self.model.sample_event(self.round, self.rng);
        self.round += 1;
        self.contacts[ev.u] += 1;
        self.contacts[ev.v] += 1;
        ev
    }
}

/// Replays a fixed event list; panics when exhausted.
pub struct Replay<I> {
    events: I,
}

impl<I: Iterator<Item = ScheduleEvent>> Replay<I> {
    pub fn new<T: IntoIterator<IntoIter = I>>(events: T) -> Self {
        Self {
            events: events.into_iter(),
        }
    }
}

impl<I: Iterator<Item = ScheduleEvent>> EventSource for Replay<I> {
    fn next_event(&mut self) -> ScheduleEvent {
        self.events.next().expect("replayed event log exhausted")
    }
}
