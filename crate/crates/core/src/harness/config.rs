//! Experiment configuration in flat `key = value` form.
//!
//! ```text
//! # weighted model, directly specified schedule
//! name = weighted-n100
//! model = weighted        # weighted | sbm | population | graph
//! n = 100
//! p = 2
//! q = 1
//! k = 2
//! eta = 0.002
//! t_oja = 300000
//! t_orth = 100000
//! cleanup = off
//! trials = 20
//! seed = 1
//! ```
//!
//! Instead of `eta`/`t_oja`/`t_orth` a config may give `eps` and `delta`
//! (plus optional `c1`, `c2`, `c3`) to derive the schedule from the measured
//! spectrum. Graph models read `graph_file` (an edge list, resolved relative
//! to the config file) and optionally `n`. Cleanup keys: `cleanup = on|off`,
//! `cleanup_eps` (weighted model, default 1/64), `cleanup_phases`,
//! `cleanup_rounds`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::io::read_edge_list;
use crate::params::ScheduleConstants;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Weighted { n: usize, p: f64, q: f64 },
    Sbm { n: usize, p: f64, q: f64 },
    Population { n: usize },
    Graph {
        path: PathBuf,
        n: usize,
        edges: Arc<Vec<(usize, usize)>>,
    },
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Weighted { n, .. }
            | ModelSpec::Sbm { n, .. }
            | ModelSpec::Population { n }
            | ModelSpec::Graph { n, .. } => *n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Weighted { .. } => "weighted",
            ModelSpec::Sbm { .. } => "sbm",
            ModelSpec::Population { .. } => "population",
            ModelSpec::Graph { .. } => "graph",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Parameterization {
    Direct { eta: f64, t_oja: u64, t_orth: u64 },
    Derived {
        eps: f64,
        delta: f64,
        consts: ScheduleConstants,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CleanupConfig {
    pub enabled: bool,
    pub eps: f64,
    pub phases: Option<usize>,
    pub rounds: Option<u64>,
}

impl Default for CleanupConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            eps: 1.0 / 64.0,
            phases: None,
            rounds: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelSpec,
    pub k: usize,
    pub schedule: Parameterization,
    pub cleanup: CleanupConfig,
    pub trials: usize,
    pub base_seed: u64,
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "model",
    "n",
    "p",
    "q",
    "graph_file",
    "k",
    "eta",
    "t_oja",
    "t_orth",
    "eps",
    "delta",
    "c1",
    "c2",
    "c3",
    "cleanup",
    "cleanup_eps",
    "cleanup_phases",
    "cleanup_rounds",
    "trials",
    "seed",
];

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown key {key:?}"),
                });
            }
            if map.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate key {key:?}"),
                });
            }
        }
        Ok(Self { map })
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| Error::Parse {
                line: *line,
                msg: format!("bad value for {key}: {v:?}"),
            }),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Config(format!("missing required key {key:?}")))
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }
}

impl ExperimentConfig {
    /// Parses config text; relative `graph_file` paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let f = Fields::parse(text)?;
        let model_kind = f.str("model").ok_or_else(|| Error::Config("missing key \"model\"".into()))?;
        let model = match model_kind {
            "weighted" => ModelSpec::Weighted {
                n: f.require("n")?,
                p: f.require("p")?,
                q: f.require("q")?,
            },
            "sbm" => ModelSpec::Sbm {
                n: f.require("n")?,
                p: f.require("p")?,
                q: f.require("q")?,
            },
            "population" => ModelSpec::Population { n: f.require("n")? },
            "graph" => {
                let rel: String = f.require("graph_file")?;
                let path = match base_dir {
                    Some(dir) => dir.join(&rel),
                    None => PathBuf::from(&rel),
                };
                let edges = read_edge_list(BufReader::new(File::open(&path)?))?;
                let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
                let n = f.get("n")?.unwrap_or(inferred);
                if n < inferred {
                    return Err(Error::Config(format!("n = {n} but edge list mentions node {}", inferred - 1)));
                }
                ModelSpec::Graph {
                    path,
                    n,
                    edges: Arc::new(edges),
                }
            }
            other => return Err(Error::Config(format!("unknown model {other:?}"))),
        };

        let direct = ["eta", "t_oja", "t_orth"].iter().any(|k| f.has(k));
        let derived = ["eps", "delta", "c1", "c2", "c3"].iter().any(|k| f.has(k));
        let schedule = match (direct, derived) {
            (true, false) => Parameterization::Direct {
                eta: f.require("eta")?,
                t_oja: f.require("t_oja")?,
                t_orth: f.require("t_orth")?,
            },
            (false, true) => {
                let d = ScheduleConstants::default();
                Parameterization::Derived {
                    eps: f.require("eps")?,
                    delta: f.require("delta")?,
                    consts: ScheduleConstants {
                        c1: f.get("c1")?.unwrap_or(d.c1),
                        c2: f.get("c2")?.unwrap_or(d.c2),
                        c3: f.get("c3")?.unwrap_or(d.c3),
                    },
                }
            }
            (true, true) => {
                return Err(Error::Config(
                    "give either eta/t_oja/t_orth or eps/delta, not both".into(),
                ))
            }
            (false, false) => {
                return Err(Error::Config("missing schedule: eta/t_oja/t_orth or eps/delta".into()))
            }
        };

        let enabled = match f.str("cleanup").unwrap_or("off") {
            "on" | "true" | "1" => true,
            "off" | "false" | "0" => false,
            other => return Err(Error::Config(format!("cleanup must be on or off, got {other:?}"))),
        };
        let cleanup = CleanupConfig {
            enabled,
            eps: f.get("cleanup_eps")?.unwrap_or(CleanupConfig::default().eps),
            phases: f.get("cleanup_phases")?,
            rounds: f.get("cleanup_rounds")?,
        };

        let cfg = ExperimentConfig {
            name: f.str("name").unwrap_or(model_kind).to_string(),
            k: f.get("k")?.unwrap_or(2),
            model,
            schedule,
            cleanup,
            trials: f.get("trials")?.unwrap_or(1),
            base_seed: f.get("seed")?.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.k == 0 || self.k >= self.model.n() {
            return Err(Error::Config(format!(
                "need 1 <= k < n, got k = {}, n = {}",
                self.k,
                self.model.n()
            )));
        }
        if self.name.is_empty() || self.name.contains(|c: char| c == ',' || c.is_whitespace()) {
            return Err(Error::Config(format!("name must be a single token, got {:?}", self.name)));
        }
        Ok(())
    }
}
