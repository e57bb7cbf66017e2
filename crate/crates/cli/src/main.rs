use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gossip_eigen::harness::trial::build_model;
use gossip_eigen::harness::{
    resolve_parallelism, run_sweep, run_trial_captured, write_csv, write_summary, ExperimentConfig,
    SweepRow,
};
use gossip_eigen::io::{read_matrix, write_edge_list, write_event_log, write_labels};
use gossip_eigen::linalg::sym_eigen;
use gossip_eigen::params::averaging_lambda2;
use gossip_eigen::rng::{trial_seed, SimRng};

#[derive(Parser)]
#[command(name = "gossip-eigen", version, about = "Gossip Oja eigenvector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trials of one config and print per-trial CSV.
    Simulate(SimulateArgs),
    /// Run several configs in parallel and write CSV plus a summary.
    Sweep(SweepArgs),
    /// Print the dense eigendecomposition of a matrix or a config's model.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write edge lists, event logs and labels for every trial here.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Worker threads (default: GOSSIP_EIGEN_PARALLELISM, else all cores).
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Per-trial CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-config quantile summary destination.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads (default: GOSSIP_EIGEN_PARALLELISM, else all cores).
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(required = true)]
    configs: Vec<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Symmetric matrix file: a line `n`, then `n` rows.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    matrix: Option<PathBuf>,
    /// Config whose communication matrix is decomposed (random models use the base seed).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also print the eigenvectors, one per row.
    #[arg(long)]
    vectors: bool,
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_file(path).with_context(|| format!("loading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = load_config(&args.config)?;
    if let Some(t) = args.trials {
        if t == 0 {
            bail!("--trials must be at least 1");
        }
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    let rows = match &args.dump {
        None => run_sweep(std::slice::from_ref(&cfg), resolve_parallelism(args.parallelism))?,
        Some(dir) => dump_trials(&cfg, dir)?,
    };
    write_csv(io::stdout().lock(), &rows)?;
    Ok(())
}

fn dump_trials(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<SweepRow>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut rows = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let (report, art) = run_trial_captured(cfg, trial_seed(cfg.base_seed, t as u64), true);
        let stem = format!("{}-trial{t}", cfg.name);
        if let Some(edges) = &art.edges {
            write_edge_list(create(&dir.join(format!("{stem}.edges")))?, edges)?;
        }
        write_event_log(create(&dir.join(format!("{stem}.events")))?, &art.oja_events)?;
        if let Some(l) = &art.labels_before {
            write_labels(create(&dir.join(format!("{stem}.labels")))?, l)?;
        }
        if let Some(l) = &art.labels_after {
            write_labels(create(&dir.join(format!("{stem}.cleaned.labels")))?, l)?;
        }
        rows.push(SweepRow {
            config: cfg.name.clone(),
            config_index: 0,
            trial: t,
            report,
        });
    }
    Ok(rows)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let configs = args.configs.iter().map(|p| load_config(p)).collect::<Result<Vec<_>>>()?;
    let rows = run_sweep(&configs, resolve_parallelism(args.parallelism))?;
    match &args.out {
        Some(p) => write_csv(create(p)?, &rows)?,
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    if let Some(p) = &args.summary {
        write_summary(create(p)?, &rows)?;
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let (m, lambda2_avg) = match (&args.matrix, &args.config) {
        (Some(path), _) => {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let m = read_matrix(BufReader::new(f))?;
            if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
                bail!("{} is not symmetric", path.display());
            }
            (m, None)
        }
        (None, Some(path)) => {
            let cfg = load_config(path)?;
            let (model, _, _) = build_model(&cfg.model, &mut SimRng::from_seed(cfg.base_seed))?;
            (model.communication_matrix(), Some(averaging_lambda2(&model)?))
        }
        (None, None) => bail!("give --matrix or --config"),
    };
    let e = sym_eigen(&m)?;
    let mut out = io::stdout().lock();
    for (i, v) in e.values.iter().enumerate() {
        writeln!(out, "lambda_{} {v}", i + 1)?;
    }
    if let Some(l2) = lambda2_avg {
        writeln!(out, "averaging_lambda_2 {l2}")?;
    }
    if args.vectors {
        for i in 0..m.rows() {
            let row: Vec<String> = e.vector(i).iter().map(|x| x.to_string()).collect();
            writeln!(out, "v_{} {}", i + 1, row.join(" "))?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Oracle(a) => oracle(a),
    }
}
