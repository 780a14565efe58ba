//! Experiment pipelines behind the `hyperbcm` binary.
//!
//! An [`ExperimentConfig`] names the experiment kind, model parameters, the
//! hypergraph to build and the trial budget. Each pipeline computes a report
//! (also usable from library code) and [`execute`] writes it as CSV and JSON
//! into the output directory. Every output file carries the master seed and an
//! echo of the configuration.

mod output;
mod pipelines;
pub mod presets;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialDistribution, SimConfig, StopRule, DEFAULT_ZERO_TOL};
use crate::error::{Error, Result};
use crate::generators::{gen_gnm, gen_hsbm, load_hypergraph, GnmParams, HsbmMode, HsbmParams};
use crate::hypergraph::{binomial, Hypergraph};
use crate::analysis::DEFAULT_CLUSTER_TOL;
use crate::stats::{trial_rng, SimRng};

pub use output::{TrajectoryBuffer, TrajectoryFormat};
pub use pipelines::{
    census, estar, generate, jumps, polarization, single_run, sweep_sigma, CensusReport, CensusRow,
    ClusterReport, CommunityReport, EstarReport, GenerateReport, JumpFit, JumpRow, JumpsReport,
    PolarizationReport, PolarizationTrial, RunReport, SigmaStats, SweepReport, SweepRow,
};

/// Stream index reserved for hypergraph generation.
const GENERATOR_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SingleRun,
    FileRun,
    ConsensusCensus,
    SigmaSweep,
    EstarCurve,
    JumpSlope,
    Polarization,
    Generate,
}

fn default_alpha() -> f64 {
    1.0
}

fn default_zero_tol() -> f64 {
    DEFAULT_ZERO_TOL
}

fn default_cluster_tol() -> f64 {
    DEFAULT_CLUSTER_TOL
}

/// Simulation parameters shared by every trial; the seed comes from the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub init: InitialDistribution,
    pub stop: StopRule,
    #[serde(default)]
    pub condition_first_pick_concordant: bool,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    #[serde(default = "default_cluster_tol")]
    pub cluster_tol: f64,
    #[serde(default)]
    pub snapshot_every: Option<u64>,
}

impl ModelParams {
    pub fn new(c: f64, init: InitialDistribution, stop: StopRule) -> Self {
        ModelParams {
            c,
            alpha: 1.0,
            init,
            stop,
            condition_first_pick_concordant: false,
            zero_tol: DEFAULT_ZERO_TOL,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            snapshot_every: None,
        }
    }

    pub fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            c: self.c,
            alpha: self.alpha,
            init: self.init,
            seed,
            stop: self.stop.clone(),
            condition_first_pick_concordant: self.condition_first_pick_concordant,
            zero_tol: self.zero_tol,
            cluster_tol: self.cluster_tol,
            snapshot_every: self.snapshot_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypergraphSpec {
    Complete {
        nodes: usize,
    },
    /// `G(N, m)` with explicit per-size counts.
    Gnm {
        nodes: usize,
        m: BTreeMap<usize, u64>,
    },
    /// `G(N, m)` with `m_i = min(per_size, C(N, i))` for every size in `min_size..=max_size`.
    GnmCapped {
        nodes: usize,
        per_size: u64,
        #[serde(default)]
        min_size: Option<usize>,
        #[serde(default)]
        max_size: Option<usize>,
    },
    Hsbm {
        #[serde(flatten)]
        params: HsbmParams,
        #[serde(default)]
        mode: HsbmMode,
    },
    File {
        path: PathBuf,
    },
}

/// A built hypergraph plus the number of skipped lines when it came from a file.
#[derive(Debug, Clone)]
pub struct BuiltHypergraph {
    pub hypergraph: Hypergraph,
    pub skipped_lines: usize,
}

impl HypergraphSpec {
    pub fn build(&self, rng: &mut SimRng) -> Result<BuiltHypergraph> {
        let hypergraph = match self {
            HypergraphSpec::Complete { nodes } => Hypergraph::complete(*nodes)?,
            HypergraphSpec::Gnm { nodes, m } => gen_gnm(&GnmParams { node_count: *nodes, m: m.clone() }, rng)?,
            HypergraphSpec::GnmCapped {
                nodes,
                per_size,
                min_size,
                max_size,
            } => {
                let lo = min_size.unwrap_or(2);
                let hi = max_size.unwrap_or(*nodes);
                let m = (lo..=hi).map(|i| {
                    let cap = binomial(*nodes, i).to_u64().unwrap_or(u64::MAX);
                    (i, (*per_size).min(cap))
                });
                gen_gnm(&GnmParams::new(*nodes, m), rng)?
            }
            HypergraphSpec::Hsbm { params, mode } => gen_hsbm(params, rng, *mode)?,
            HypergraphSpec::File { path } => {
                let loaded = load_hypergraph(path)?;
                if loaded.skipped > 0 {
                    log::warn!("{}: skipped {} lines with fewer than two nodes", path.display(), loaded.skipped);
                }
                return Ok(BuiltHypergraph {
                    hypergraph: loaded.hypergraph,
                    skipped_lines: loaded.skipped,
                });
            }
        };
        Ok(BuiltHypergraph {
            hypergraph,
            skipped_lines: 0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_step: f64,
    /// Convergence threshold on `d(V, x)`.
    pub epsilon: f64,
    /// Step cap; runs reaching it are recorded as cutoffs with `t* = cutoff`.
    pub cutoff: u64,
}

impl SweepParams {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.sigma_step > 0.0) || !(self.sigma_min > 0.0) || self.sigma_max < self.sigma_min {
            return Err(Error::invalid("sigma grid needs 0 < sigma_min <= sigma_max and a positive step"));
        }
        let count = ((self.sigma_max - self.sigma_min) / self.sigma_step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| self.sigma_min + k as f64 * self.sigma_step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstarParams {
    pub max_nodes: usize,
    pub trials_per_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpParams {
    pub nodes: usize,
    pub hypergraphs: usize,
    pub trials: u64,
    pub sigmas: Vec<f64>,
    /// Hypergraphs with at most this many hyperedges are generated explicitly; larger
    /// ones are sampled through their size distribution.
    pub explicit_edge_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationParams {
    /// Initial opinion distribution for each community.
    pub community_init: Vec<InitialDistribution>,
}

fn default_trials() -> u64 {
    1
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelParams,
    /// Required by every kind except `estar-curve` and `jump-slope`, which build
    /// their own samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypergraph: Option<HypergraphSpec>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Worker threads; `None` uses every core. Not echoed into outputs, which do
    /// not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub trajectory: TrajectoryFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estar: Option<EstarParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<PolarizationParams>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        self.model.sim_config(self.seed).validate()?;
        let missing = |what: &str| Error::invalid(format!("{:?} experiment needs a `{what}` section", self.kind));
        match self.kind {
            ExperimentKind::SigmaSweep => {
                self.sweep.as_ref().ok_or_else(|| missing("sweep"))?.grid()?;
            }
            ExperimentKind::EstarCurve => {
                let e = self.estar.as_ref().ok_or_else(|| missing("estar"))?;
                if e.max_nodes < 2 || e.trials_per_size == 0 {
                    return Err(Error::invalid("estar needs max_nodes >= 2 and trials_per_size >= 1"));
                }
            }
            ExperimentKind::JumpSlope => {
                let j = self.jumps.as_ref().ok_or_else(|| missing("jumps"))?;
                if j.nodes < 2 || j.hypergraphs == 0 || j.trials == 0 || j.sigmas.iter().any(|&s| !(s > 0.0)) {
                    return Err(Error::invalid("jumps needs nodes >= 2, hypergraphs, trials and positive sigmas"));
                }
            }
            ExperimentKind::Polarization => {
                let p = self.polarization.as_ref().ok_or_else(|| missing("polarization"))?;
                let Some(HypergraphSpec::Hsbm { params, .. }) = &self.hypergraph else {
                    return Err(Error::invalid("polarization needs an hsbm hypergraph"));
                };
                if p.community_init.len() != params.community_sizes.len() {
                    return Err(Error::invalid("one initial distribution per community is required"));
                }
                for d in &p.community_init {
                    d.validate()?;
                }
            }
            ExperimentKind::FileRun
                if !matches!(self.hypergraph, Some(HypergraphSpec::File { .. })) => {
                    return Err(Error::invalid("file-run needs a file hypergraph"));
                }
            _ => {}
        }
        let needs_graph = !matches!(self.kind, ExperimentKind::EstarCurve | ExperimentKind::JumpSlope);
        if needs_graph && self.hypergraph.is_none() {
            return Err(missing("hypergraph"));
        }
        Ok(())
    }

    /// Builds the configured hypergraph from the generator stream of the master seed.
    pub fn build_hypergraph(&self) -> Result<BuiltHypergraph> {
        self.hypergraph
            .as_ref()
            .ok_or_else(|| Error::invalid("no hypergraph configured"))?
            .build(&mut trial_rng(self.seed, GENERATOR_STREAM))
    }

    /// Runs `f` on a pool with the configured thread count.
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            builder = builder.num_threads(t);
        }
        let pool = builder.build().map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// Result of executing a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Some run hit its step cap without converging.
    pub cutoff: bool,
}

impl Outcome {
    /// 0 on success, 2 when a run was cut off.
    pub fn exit_code(&self) -> i32 {
        if self.cutoff {
            2
        } else {
            0
        }
    }
}

/// Runs the configured experiment and writes its outputs into `cfg.out_dir`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let out = output::Writer::new(cfg);
    match cfg.kind {
        ExperimentKind::Generate => {
            let (report, built) = generate(cfg)?;
            out.generate(&report, &built.hypergraph)
        }
        ExperimentKind::SingleRun | ExperimentKind::FileRun => {
            let mut traj = output::TrajectoryBuffer::new(cfg.trajectory);
            let report = single_run(cfg, |s| traj.push(s))?;
            out.single_run(&report, &traj)
        }
        ExperimentKind::ConsensusCensus => out.census(&census(cfg)?),
        ExperimentKind::SigmaSweep => out.sweep(&sweep_sigma(cfg)?),
        ExperimentKind::EstarCurve => out.estar(&estar(cfg)?),
        ExperimentKind::JumpSlope => out.jumps(&jumps(cfg)?),
        ExperimentKind::Polarization => out.polarization(&polarization(cfg)?),
    }
}
