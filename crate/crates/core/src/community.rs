//! Sign labeling, majority-vote cleanup and misclassification counts.

use crate::error::{Error, Result};
use crate::model::{CommunicationModel, EventSource, GroundTruth, Scheduler};
use crate::rng::SimRng;

/// Per-node community label, `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    pub values: Vec<i8>,
}

impl Labels {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidInput("labels must be +1 or -1".into()));
        }
        Ok(Self { values })
    }

    pub fn from_truth(truth: &GroundTruth) -> Self {
        Self {
            values: truth.chi.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|&x| -x).collect(),
        }
    }
}

#[inline]
fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// `χ̂_u = sign(v̂_u)` with `sign(0) = +1`.
pub fn assign_labels(vhat2: &[f64]) -> Labels {
    Labels {
        values: vhat2.iter().map(|&x| sign(x)).collect(),
    }
}

/// Hamming distance to the truth, minimized over a global flip.
pub fn misclassification(labels: &Labels, truth: &GroundTruth) -> usize {
    assert_eq!(labels.len(), truth.len(), "label/truth length mismatch");
    let disagree = labels
        .values
        .iter()
        .zip(&truth.chi)
        .filter(|(a, b)| a != b)
        .count();
    disagree.min(labels.len() - disagree)
}

/// Quantities the cleanup round count was derived from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CleanupDerivation {
    Weighted {
        eps: f64,
        p_prime: f64,
        q_prime: f64,
    },
    Sbm {
        delta: f64,
        p_second: f64,
        q_second: f64,
        tolerated_eps: f64,
    },
    Manual,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CleanupParams {
    pub phases: usize,
    pub rounds_per_phase: u64,
    pub derivation: CleanupDerivation,
}

impl CleanupParams {
    pub fn manual(phases: usize, rounds_per_phase: u64) -> Self {
        Self {
            phases,
            rounds_per_phase,
            derivation: CleanupDerivation::Manual,
        }
    }
}

fn rounds_for(scale: f64, a: f64, b: f64) -> u64 {
    let d = a.sqrt() - b.sqrt();
    (scale / (d * d)).ceil().max(1.0) as u64
}

/// One phase for the weighted model, `eps` the assumed fraction of wrong labels.
///
/// `p′ = (1−ε)p/(p+q)`, `q′ = (q+εp)/(p+q)`, `r = ⌈72 n ln n / (√p′ − √q′)²⌉`.
pub fn cleanup_params_weighted(n: usize, p: f64, q: f64, eps: f64) -> Result<CleanupParams> {
    if n < 2 || !(q > 0.0) || !(p > q) {
        return Err(Error::InvalidParameters(format!(
            "need n >= 2 and p > q > 0, got n = {n}, p = {p}, q = {q}"
        )));
    }
    if !(0.0..=1.0 / 64.0).contains(&eps) {
        return Err(Error::InvalidParameters(format!("eps must be in [0, 1/64], got {eps}")));
    }
    let p_prime = (1.0 - eps) * p / (p + q);
    let q_prime = (q + eps * p) / (p + q);
    if !(p_prime > q_prime) {
        return Err(Error::InfeasibleCleanup(format!(
            "p' = {p_prime} does not exceed q' = {q_prime}"
        )));
    }
    let nf = n as f64;
    Ok(CleanupParams {
        phases: 1,
        rounds_per_phase: rounds_for(72.0 * nf * nf.ln(), p_prime, q_prime),
        derivation: CleanupDerivation::Weighted {
            eps,
            p_prime,
            q_prime,
        },
    })
}

/// Phased cleanup for the stochastic block model.
///
/// `Δ = p/2 − q/2 − √(12p ln n/n) − √(12q ln n/n)`,
/// `p″ = p/2 − √(6p ln n/n) − Δ/12`, `q″ = q/2 + √(6q ln n/n) + Δ/12`,
/// `r = ⌈72 p n ln n / (√p″ − √q″)²⌉`, `⌈6 ln n⌉` phases, tolerated initial
/// error fraction `Δ/(24p)`.
pub fn cleanup_params_sbm(n: usize, p: f64, q: f64) -> Result<CleanupParams> {
    if n < 2 || !(q > 0.0) || !(p > 0.0) || p > 1.0 || q > 1.0 {
        return Err(Error::InvalidParameters(format!(
            "need n >= 2 and p, q in (0, 1], got n = {n}, p = {p}, q = {q}"
        )));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let delta = p / 2.0 - q / 2.0 - (12.0 * p * ln_n / nf).sqrt() - (12.0 * q * ln_n / nf).sqrt();
    if !(delta > 0.0) {
        return Err(Error::InfeasibleCleanup(format!("delta = {delta} is not positive")));
    }
    let p_second = p / 2.0 - (6.0 * p * ln_n / nf).sqrt() - delta / 12.0;
    let q_second = q / 2.0 + (6.0 * q * ln_n / nf).sqrt() + delta / 12.0;
    if !(p_second > q_second) || !(q_second > 0.0) {
        return Err(Error::InfeasibleCleanup(format!(
            "p'' = {p_second} does not exceed q'' = {q_second}"
        )));
    }
    Ok(CleanupParams {
        phases: (6.0 * ln_n).ceil() as usize,
        rounds_per_phase: rounds_for(72.0 * p * nf * ln_n, p_second, q_second),
        derivation: CleanupDerivation::Sbm {
            delta,
            p_second,
            q_second,
            tolerated_eps: delta / (24.0 * p),
        },
    })
}

/// Runs the phases from `source`, returning the labels after every phase.
///
/// Within a phase each interaction adds the partner's phase-start label to a
/// node's running sum. At the barrier a node with at least one sample takes
/// the sign of its sum (`≥ 0` gives `+1`); unsampled nodes keep their label.
pub fn cleanup_phases<S: EventSource>(
    labels: &Labels,
    params: &CleanupParams,
    source: &mut S,
) -> Vec<Labels> {
    let n = labels.len();
    let mut current = labels.clone();
    let mut history = Vec::with_capacity(params.phases);
    let mut sums = vec![0i64; n];
    let mut counts = vec![0u64; n];
    for _ in 0..params.phases {
        sums.iter_mut().for_each(|s| *s = 0);
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..params.rounds_per_phase {
            let ev = source.next_event();
            sums[ev.u] += current.values[ev.v] as i64;
            sums[ev.v] += current.values[ev.u] as i64;
            counts[ev.u] += 1;
            counts[ev.v] += 1;
        }
        for u in 0..n {
            if counts[u] > 0 {
                current.values[u] = if sums[u] >= 0 { 1 } else { -1 };
            }
        }
        history.push(current.clone());
    }
    history
}

pub fn run_cleanup(
    model: &CommunicationModel,
    labels: &Labels,
    params: &CleanupParams,
    rng: &mut SimRng,
) -> Result<Labels> {
    if labels.len() != model.n() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} nodes",
            labels.len(),
            model.n()
        )));
    }
    let mut scheduler = Scheduler::new(model, rng);
    Ok(cleanup_phases(labels, params, &mut scheduler)
        .pop()
        .unwrap_or_else(|| labels.clone()))
}
