//! Spectral facts and step-size/horizon schedules.
//!
//! All logarithms are natural.

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, SymEigen};
use crate::model::{CommunicationModel, GroundTruth};
use crate::oja::OjaSchedule;

/// Closed-form spectrum of `D + W` for the `(n, p, q)`-weighted model.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSpectralFacts {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Shared value of `λ_3 … λ_n`.
    pub lambda_tail: f64,
    pub gap12: f64,
    pub gap23: f64,
    pub rho: f64,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

pub fn weighted_spectral_facts(n: usize, p: f64, q: f64) -> Result<WeightedSpectralFacts> {
    if n < 4 || n % 2 != 0 || !(q > 0.0) || !(p > q) {
        return Err(Error::InvalidParameters(format!(
            "need even n >= 4 and p > q > 0, got n = {n}, p = {p}, q = {q}"
        )));
    }
    let nf = n as f64;
    let lambda1 = 4.0 / nf;
    let lambda2 = 4.0 / nf * p / (p + nf / (nf - 2.0) * q);
    let lambda_tail = 2.0 / nf - 4.0 * p / (nf * nf * (p + q) - 2.0 * nf * p);
    let rho = (q / (p + q)).min((p - q) / (p + q));
    Ok(WeightedSpectralFacts {
        lambda1,
        lambda2,
        lambda_tail,
        gap12: lambda1 - lambda2,
        gap23: lambda2 - lambda_tail,
        rho,
        v1: vec![1.0 / nf.sqrt(); n],
        v2: GroundTruth::balanced(n).unit_vector(),
    })
}

/// Second eigenvalue of `I − D/2 + W/2`.
pub fn averaging_lambda2(model: &CommunicationModel) -> Result<f64> {
    let e = sym_eigen(&model.averaging_matrix())?;
    Ok(e.values.get(1).copied().unwrap_or(0.0))
}

/// `min(1/n, ln(1/λ₂(I − D/2 + W/2)))`.
pub fn mixing_bound(model: &CommunicationModel) -> Result<f64> {
    let lambda2 = averaging_lambda2(model)?;
    // Within rounding of 1 means a disconnected graph.
    if !(lambda2 < 1.0 - 1e-12) {
        return Err(Error::NoMixing { lambda2 });
    }
    let inv_n = 1.0 / model.n() as f64;
    if lambda2 <= 0.0 {
        return Ok(inv_n);
    }
    Ok(inv_n.min((1.0 / lambda2).ln()))
}

/// Bounds feeding the schedule formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds {
    /// Upper bound on the sum of the top `k` eigenvalues.
    pub lambda_sum: f64,
    /// Lower bound on the smallest of the top-`k` consecutive gaps.
    pub gap: f64,
    pub gamma_mix: f64,
}

/// Bounds measured from a computed spectrum (taken as exact).
pub fn measured_bounds(eig: &SymEigen, k: usize, gamma_mix: f64) -> Result<SpectralBounds> {
    if k == 0 || k >= eig.values.len() {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= k < n, got k = {k}, n = {}",
            eig.values.len()
        )));
    }
    let lambda_sum = eig.values[..k].iter().sum();
    let gap = (0..k)
        .map(|j| eig.values[j] - eig.values[j + 1])
        .fold(f64::INFINITY, f64::min);
    Ok(SpectralBounds {
        lambda_sum,
        gap,
        gamma_mix,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for ScheduleConstants {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
        }
    }
}

/// Schedule before rounding the horizons up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawSchedule {
    pub xi: f64,
    pub eta: f64,
    pub t_oja: f64,
    pub t_orth: f64,
}

/// Step size and horizons from the eigenvector-approximation bounds:
///
/// ```text
/// ξ  = n / (δ ε gap)
/// η  = c1 ε² gap δ² / (Λ k³ ln³ ξ)
/// T  = c2 (ln ξ + 1/ε) / (gap η)
/// T′ = c3 (ln ξ + 1/ε) λ1 / (gap γ_mix)
/// ```
pub fn raw_schedule(
    n: usize,
    bounds: &SpectralBounds,
    k: usize,
    eps: f64,
    delta: f64,
    consts: &ScheduleConstants,
    lambda1: f64,
) -> Result<RawSchedule> {
    let positive = [
        bounds.lambda_sum,
        bounds.gap,
        bounds.gamma_mix,
        lambda1,
        consts.c1,
        consts.c2,
        consts.c3,
    ];
    if positive.iter().any(|&x| !(x > 0.0) || !x.is_finite()) || k == 0 || n == 0 {
        return Err(Error::InvalidParameters("schedule inputs must be positive".into()));
    }
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "eps and delta must be in (0,1), got {eps}, {delta}"
        )));
    }
    let xi = n as f64 / (delta * eps * bounds.gap);
    let log_xi = xi.ln();
    let kf = k as f64;
    let eta = consts.c1 * eps * eps * bounds.gap * delta * delta
        / (bounds.lambda_sum * kf * kf * kf * log_xi.powi(3));
    let horizon = log_xi + 1.0 / eps;
    let t_oja = consts.c2 * horizon / (bounds.gap * eta);
    let t_orth = consts.c3 * horizon * lambda1 / (bounds.gap * bounds.gamma_mix);
    Ok(RawSchedule {
        xi,
        eta,
        t_oja,
        t_orth,
    })
}

pub fn oja_schedule(
    n: usize,
    bounds: &SpectralBounds,
    k: usize,
    eps: f64,
    delta: f64,
    consts: &ScheduleConstants,
    lambda1: f64,
) -> Result<OjaSchedule> {
    let raw = raw_schedule(n, bounds, k, eps, delta, consts, lambda1)?;
    Ok(OjaSchedule {
        k,
        eta: raw.eta,
        t_oja: raw.t_oja.ceil() as u64,
        t_orth: raw.t_orth.ceil() as u64,
    })
}
