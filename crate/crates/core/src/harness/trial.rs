//! One end-to-end trial: model, gossip Oja, gossip orthogonalization, sign
//! labels, optional cleanup, and metrics against the dense eigensolver.
//!
//! A trial draws everything from a single random stream seeded by its seed,
//! in this order: graph sampling (SBM only), the Gaussian start, then the
//! scheduler events of the Oja, orthogonalization and cleanup stages.

use crate::community::{
    assign_labels, cleanup_params_sbm, cleanup_params_weighted, cleanup_phases, misclassification,
    CleanupParams, Labels,
};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sym_eigen, Matrix, SymEigen};
use crate::model::{
    graph_model, population_model, sbm_model, weighted_model, CommunicationModel, GroundTruth,
    ScheduleEvent, Scheduler,
};
use crate::oja::{init_states, oja_rounds, OjaSchedule, OVERFLOW_LIMIT};
use crate::orth::orth_rounds;
use crate::params::{measured_bounds, mixing_bound, oja_schedule};
use crate::rng::SimRng;

use super::config::{CleanupConfig, ExperimentConfig, ModelSpec, Parameterization};

/// Measured outcome of a trial. `None` fields print as `NA`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub seed: u64,
    /// `None` on success, otherwise the error token.
    pub failure: Option<&'static str>,
    pub n: usize,
    pub k: usize,
    pub eta: Option<f64>,
    pub t_oja: Option<u64>,
    pub t_orth: Option<u64>,
    pub alignment_1: Option<f64>,
    pub alignment_2: Option<f64>,
    pub norm_2: Option<f64>,
    pub subspace_error: Option<f64>,
    /// `|v₂ᵀ χ/√n|` for the exact second eigenvector of the realized model.
    pub truth_alignment: Option<f64>,
    pub misclass_before: Option<usize>,
    pub misclass_after_cleanup: Option<usize>,
    pub orth_failures: Option<usize>,
    pub rounds_used: Option<u64>,
    pub local_rounds_max: Option<u64>,
}

impl TrialReport {
    fn empty(seed: u64, n: usize, k: usize) -> Self {
        Self {
            seed,
            failure: None,
            n,
            k,
            eta: None,
            t_oja: None,
            t_orth: None,
            alignment_1: None,
            alignment_2: None,
            norm_2: None,
            subspace_error: None,
            truth_alignment: None,
            misclass_before: None,
            misclass_after_cleanup: None,
            orth_failures: None,
            rounds_used: None,
            local_rounds_max: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }

    pub const COLUMNS: [&'static str; 17] = [
        "seed",
        "status",
        "n",
        "k",
        "eta",
        "t_oja",
        "t_orth",
        "alignment_1",
        "alignment_2",
        "norm_2",
        "subspace_error",
        "truth_alignment",
        "misclass_before",
        "misclass_after_cleanup",
        "orth_failures",
        "rounds_used",
        "local_rounds_max",
    ];

    /// Fields in [`TrialReport::COLUMNS`] order.
    pub fn fields(&self) -> Vec<String> {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map_or_else(|| "NA".to_string(), T::to_string)
        }
        vec![
            self.seed.to_string(),
            self.failure.unwrap_or("ok").to_string(),
            self.n.to_string(),
            self.k.to_string(),
            opt(&self.eta),
            opt(&self.t_oja),
            opt(&self.t_orth),
            opt(&self.alignment_1),
            opt(&self.alignment_2),
            opt(&self.norm_2),
            opt(&self.subspace_error),
            opt(&self.truth_alignment),
            opt(&self.misclass_before),
            opt(&self.misclass_after_cleanup),
            opt(&self.orth_failures),
            opt(&self.rounds_used),
            opt(&self.local_rounds_max),
        ]
    }
}

/// Intermediate products kept when a trial is run with capture on.
#[derive(Clone, Debug, Default)]
pub struct TrialArtifacts {
    pub edges: Option<Vec<(usize, usize)>>,
    pub oja_events: Vec<ScheduleEvent>,
    pub vhat: Option<Matrix>,
    pub labels_before: Option<Labels>,
    pub labels_after: Option<Labels>,
}

/// `‖Zᵀ V̂‖²_F` where `Z` spans the bottom `n − k` eigenvectors of `m`.
pub fn subspace_error(vhat: &Matrix, m: &Matrix) -> Result<f64> {
    let eig = sym_eigen(m)?;
    Ok(subspace_error_with(vhat, &eig))
}

pub fn subspace_error_with(vhat: &Matrix, eig: &SymEigen) -> f64 {
    let n = eig.values.len();
    let k = vhat.cols();
    assert_eq!(vhat.rows(), n);
    let mut total = 0.0;
    for z in k..n {
        let zc = eig.vector(z);
        for i in 0..k {
            let c = dot(&zc, &vhat.column(i));
            total += c * c;
        }
    }
    total
}

/// Builds the model for a config, drawing from `rng` when it is random.
pub fn build_model(
    spec: &ModelSpec,
    rng: &mut SimRng,
) -> Result<(CommunicationModel, Option<GroundTruth>, Option<Vec<(usize, usize)>>)> {
    Ok(match spec {
        ModelSpec::Weighted { n, p, q } => {
            let (m, t) = weighted_model(*n, *p, *q)?;
            (m, Some(t), None)
        }
        ModelSpec::Sbm { n, p, q } => {
            let (m, t, e) = sbm_model(*n, *p, *q, rng)?;
            (m, Some(t), Some(e))
        }
        ModelSpec::Population { n } => (population_model(*n)?, None, None),
        ModelSpec::Graph { n, edges, .. } => (graph_model(*n, edges)?, None, None),
    })
}

fn resolve_cleanup(spec: &ModelSpec, cfg: &CleanupConfig) -> Result<CleanupParams> {
    let derived = match spec {
        ModelSpec::Weighted { n, p, q } => Some(cleanup_params_weighted(*n, *p, *q, cfg.eps)),
        ModelSpec::Sbm { n, p, q } => Some(cleanup_params_sbm(*n, *p, *q)),
        _ => None,
    };
    match (derived, cfg.phases, cfg.rounds) {
        (_, Some(phases), Some(rounds)) => Ok(CleanupParams::manual(phases, rounds)),
        (Some(d), phases, rounds) => {
            let mut d = d?;
            if let Some(p) = phases {
                d.phases = p;
            }
            if let Some(r) = rounds {
                d.rounds_per_phase = r;
            }
            Ok(d)
        }
        (None, _, _) => Err(Error::Config(
            "cleanup on this model needs cleanup_phases and cleanup_rounds".into(),
        )),
    }
}

pub fn run_trial(config: &ExperimentConfig, seed: u64) -> TrialReport {
    run_trial_captured(config, seed, false).0
}

/// Runs a trial; errors become a failed report rather than an `Err`.
pub fn run_trial_captured(
    config: &ExperimentConfig,
    seed: u64,
    capture: bool,
) -> (TrialReport, TrialArtifacts) {
    let mut report = TrialReport::empty(seed, config.model.n(), config.k);
    let mut artifacts = TrialArtifacts::default();
    if let Err(e) = pipeline(config, seed, capture, &mut report, &mut artifacts) {
        report.failure = Some(e.token());
    }
    (report, artifacts)
}

fn pipeline(
    config: &ExperimentConfig,
    seed: u64,
    capture: bool,
    report: &mut TrialReport,
    artifacts: &mut TrialArtifacts,
) -> Result<()> {
    let mut rng = SimRng::from_seed(seed);
    let (model, truth, edges) = build_model(&config.model, &mut rng)?;
    if capture {
        artifacts.edges = edges;
    }
    let n = model.n();
    let k = config.k;
    let cleanup = if config.cleanup.enabled {
        Some(resolve_cleanup(&config.model, &config.cleanup)?)
    } else {
        None
    };
    let eig = sym_eigen(&model.communication_matrix())?;

    let schedule = match config.schedule {
        Parameterization::Direct { eta, t_oja, t_orth } => OjaSchedule { k, eta, t_oja, t_orth },
        Parameterization::Derived { eps, delta, consts } => {
            let bounds = measured_bounds(&eig, k, mixing_bound(&model)?)?;
            oja_schedule(n, &bounds, k, eps, delta, &consts, eig.values[0])?
        }
    };
    schedule.validate()?;
    report.eta = Some(schedule.eta);
    report.t_oja = Some(schedule.t_oja);
    report.t_orth = Some(schedule.t_orth);

    let mut state = init_states(n, k, &mut rng)?;
    let mut scheduler = Scheduler::new(&model, &mut rng);
    let log = capture.then_some(&mut artifacts.oja_events);
    oja_rounds(&mut state, &mut scheduler, schedule.t_oja, schedule.eta, OVERFLOW_LIMIT, log)?;
    let orth = orth_rounds(&state, &mut scheduler, schedule.t_orth);
    report.orth_failures = Some(orth.failures);

    let vhat = &orth.vhat;
    report.alignment_1 = Some(dot(&vhat.column(0), &eig.vector(0)).abs());
    report.subspace_error = Some(subspace_error_with(vhat, &eig));

    if k >= 2 {
        let v2 = vhat.column(1);
        report.alignment_2 = Some(dot(&v2, &eig.vector(1)).abs());
        report.norm_2 = Some(norm(&v2));
        if let Some(truth) = &truth {
            report.truth_alignment = Some(dot(&eig.vector(1), &truth.unit_vector()).abs());
            let labels = assign_labels(&v2);
            report.misclass_before = Some(misclassification(&labels, truth));
            if let Some(params) = &cleanup {
                let after = cleanup_phases(&labels, params, &mut scheduler)
                    .pop()
                    .unwrap_or_else(|| labels.clone());
                report.misclass_after_cleanup = Some(misclassification(&after, truth));
                if capture {
                    artifacts.labels_after = Some(after);
                }
            }
            if capture {
                artifacts.labels_before = Some(labels);
            }
        }
    }

    report.rounds_used = Some(scheduler.rounds());
    report.local_rounds_max = scheduler.contacts().iter().copied().max();
    if capture {
        artifacts.vhat = Some(orth.vhat);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text, None).unwrap()
    }

    #[test]
    fn subspace_error_cases() {
        let m = Matrix::diagonal(&[3.0, 2.0, 1.0]);
        let top = Matrix::from_rows(&[[1.0], [0.0], [0.0]]);
        assert!(subspace_error(&top, &m).unwrap() < 1e-10);
        let bottom = Matrix::from_rows(&[[0.0], [0.0], [1.0]]);
        assert!((subspace_error(&bottom, &m).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic_reports() {
        let c = cfg("model = sbm\nn = 20\np = 0.6\nq = 0.1\neta = 0.01\nt_oja = 2000\nt_orth = 2000\n");
        assert_eq!(run_trial(&c, 4).fields(), run_trial(&c, 4).fields());
        assert_ne!(run_trial(&c, 4).fields(), run_trial(&c, 5).fields());
    }

    #[test]
    fn failures_are_reported_not_raised() {
        let c = cfg("model = weighted\nn = 10\np = 2\nq = 1\neta = 5\nt_oja = 100000\nt_orth = 10\n");
        let r = run_trial(&c, 0);
        assert_eq!(r.failure, Some("step_size_too_large"));
        assert_eq!(r.fields()[1], "step_size_too_large");

        let c = cfg("model = sbm\nn = 1024\np = 0.5\nq = 0.25\neta = 0.01\nt_oja = 10\nt_orth = 10\ncleanup = on\n");
        assert_eq!(run_trial(&c, 0).failure, Some("infeasible_cleanup"));
    }

    #[test]
    fn round_accounting() {
        let c = cfg(
            "model = weighted\nn = 8\np = 2\nq = 1\neta = 0.01\nt_oja = 300\nt_orth = 200\n\
             cleanup = on\ncleanup_phases = 2\ncleanup_rounds = 50\n",
        );
        let r = run_trial(&c, 1);
        assert!(r.is_ok(), "{r:?}");
        assert_eq!(r.rounds_used, Some(600));
        assert!(r.misclass_after_cleanup.is_some());
    }

    #[test]
    fn population_has_no_truth_columns() {
        let c = cfg("model = population\nn = 6\neta = 0.01\nt_oja = 100\nt_orth = 100\n");
        let r = run_trial(&c, 0);
        assert!(r.is_ok());
        assert_eq!(r.misclass_before, None);
        assert_eq!(r.fields()[12], "NA");
        let c = cfg("model = population\nn = 6\neta = 0.01\nt_oja = 100\nt_orth = 100\ncleanup = on\n");
        assert_eq!(run_trial(&c, 0).failure, Some("config"));
    }
}
