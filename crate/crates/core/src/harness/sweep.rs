//! Parallel sweeps over configs and trials, CSV output and summaries.
//!
//! Rows are sorted by (config index, trial index) before writing, so the
//! output bytes do not depend on the number of worker threads.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::trial_seed;

use super::config::ExperimentConfig;
use super::trial::{run_trial, TrialReport};

/// Environment variable consulted for the default worker count.
pub const PARALLELISM_ENV: &str = "GOSSIP_EIGEN_PARALLELISM";

/// Worker count: explicit value, else the environment variable, else the
/// number of available cores.
pub fn resolve_parallelism(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(PARALLELISM_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub config: String,
    pub config_index: usize,
    pub trial: usize,
    pub report: TrialReport,
}

pub fn run_sweep(configs: &[ExperimentConfig], parallelism: usize) -> Result<Vec<SweepRow>> {
    if configs.is_empty() {
        return Err(Error::Config("sweep needs at least one config".into()));
    }
    let jobs: Vec<(usize, usize)> = configs
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| (0..c.trials).map(move |t| (ci, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, t)| {
                let cfg = &configs[ci];
                SweepRow {
                    config: cfg.name.clone(),
                    config_index: ci,
                    trial: t,
                    report: run_trial(cfg, trial_seed(cfg.base_seed, t as u64)),
                }
            })
            .collect()
    });
    rows.sort_by_key(|r| (r.config_index, r.trial));
    Ok(rows)
}

pub fn csv_header() -> Vec<&'static str> {
    let mut h = vec!["config", "trial"];
    h.extend(TrialReport::COLUMNS);
    h
}

pub fn write_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(csv_header())?;
    for row in rows {
        let mut rec = vec![row.config.clone(), row.trial.to_string()];
        rec.extend(row.report.fields());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

type Metric = (&'static str, fn(&TrialReport) -> Option<f64>);

const SUMMARY_METRICS: [Metric; 6] = [
    ("alignment_1", |r| r.alignment_1),
    ("alignment_2", |r| r.alignment_2),
    ("subspace_error", |r| r.subspace_error),
    ("misclass_before", |r| r.misclass_before.map(|x| x as f64)),
    ("misclass_after_cleanup", |r| r.misclass_after_cleanup.map(|x| x as f64)),
    ("local_rounds_max", |r| r.local_rounds_max.map(|x| x as f64)),
];

/// Per config and metric: trial count, failures, and min/q10/median/q90/max
/// over the trials where the metric is defined.
pub fn write_summary<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "config", "metric", "trials", "failed", "count", "min", "q10", "median", "q90", "max",
    ])?;
    let mut start = 0;
    while start < rows.len() {
        let ci = rows[start].config_index;
        let end = start + rows[start..].iter().take_while(|r| r.config_index == ci).count();
        let group = &rows[start..end];
        let failed = group.iter().filter(|r| !r.report.is_ok()).count();
        for (name, get) in SUMMARY_METRICS {
            let mut vals: Vec<f64> = group.iter().filter_map(|r| get(&r.report)).collect();
            if vals.is_empty() {
                continue;
            }
            vals.sort_by(|a, b| a.total_cmp(b));
            let mut rec = vec![
                group[0].config.clone(),
                name.to_string(),
                group.len().to_string(),
                failed.to_string(),
                vals.len().to_string(),
            ];
            for q in [0.0, 0.1, 0.5, 0.9, 1.0] {
                rec.push(quantile(&vals, q).to_string());
            }
            out.write_record(&rec)?;
        }
        start = end;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn three_trials_three_rows() {
        let c = ExperimentConfig::parse(
            "name = tiny\nmodel = weighted\nn = 6\np = 2\nq = 1\neta = 0.05\nt_oja = 100\nt_orth = 100\ntrials = 3\n",
            None,
        )
        .unwrap();
        let rows = run_sweep(&[c], 2).unwrap();
        assert_eq!(rows.len(), 3);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("config,trial,seed,status,"));
        assert!(lines[1].starts_with("tiny,0,0,ok,"));

        let mut buf = Vec::new();
        write_summary(&mut buf, &rows).unwrap();
        let summary = String::from_utf8(buf).unwrap();
        assert!(summary.lines().any(|l| l.starts_with("tiny,alignment_2,3,0,3,")));
    }

    #[test]
    fn empty_sweep_is_an_error() {
        assert!(run_sweep(&[], 1).is_err());
    }

    #[test]
    fn explicit_parallelism_wins() {
        assert_eq!(resolve_parallelism(Some(3)), 3);
        assert_eq!(resolve_parallelism(Some(0)), 1);
    }
}
