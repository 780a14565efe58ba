use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::concordance::{concordance_table, estar_curve, limiting_concordance, ConcordanceEstimate};
use crate::analysis::jumps::single_jump_probability;
use crate::analysis::{extract_clusters, ClusterSet};
use crate::dynamics::{
    apply_update, is_absorbing_clustered, is_absorbing_explicit, InitialDistribution, OpinionState, SimSummary,
    Simulation, StopReason, StopRule,
};
use crate::error::{Error, Result};
use crate::generators::{gen_gnm, GnmParams};
use crate::hypergraph::{sample_k_subset, Hypergraph, NodeId, Representation};
use crate::stats::{kahan_mean, linear_fit, ln_binomial, median, trial_rng, LinearFit, Welford};

use super::{BuiltHypergraph, ExperimentConfig, HypergraphSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub value: f64,
    pub size: usize,
}

fn cluster_reports(cs: &ClusterSet) -> Vec<ClusterReport> {
    cs.clusters()
        .iter()
        .map(|c| ClusterReport {
            value: c.value,
            size: c.size,
        })
        .collect()
}

fn representation_name(h: &Hypergraph) -> &'static str {
    match h.representation() {
        Representation::Explicit(_) => "explicit",
        Representation::Complete => "complete",
        Representation::Block(_) => "block",
    }
}

/// Absorption of a final state: exact for explicit hypergraphs, via the clustered
/// criterion otherwise. `None` when the state is not clustered within tolerance or
/// the structure is outside what the clustered criterion decides.
pub(crate) fn final_absorbing(h: &Hypergraph, opinions: &[f64], cfg: &ExperimentConfig) -> Result<Option<bool>> {
    if h.is_explicit() {
        return is_absorbing_explicit(h, opinions, cfg.model.c, cfg.model.zero_tol).map(Some);
    }
    let cs = extract_clusters(opinions, cfg.model.cluster_tol);
    if !cs.is_exact() {
        return Ok(None);
    }
    match is_absorbing_clustered(&cs, h, cfg.model.c) {
        Ok(b) => Ok(Some(b)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateReport {
    pub representation: &'static str,
    pub node_count: usize,
    /// Exact count as a decimal string; it can exceed any machine integer.
    pub edge_count: String,
    /// Hyperedges per size, for sizes that occur.
    pub size_counts: BTreeMap<usize, String>,
    pub skipped_lines: usize,
}

pub fn generate(cfg: &ExperimentConfig) -> Result<(GenerateReport, BuiltHypergraph)> {
    let built = cfg.build_hypergraph()?;
    let h = &built.hypergraph;
    let size_counts = (2..=h.node_count())
        .map(|n| (n, h.count_of_size(n)))
        .filter(|(_, c)| c.bits() > 0)
        .map(|(n, c)| (n, c.to_string()))
        .collect();
    let report = GenerateReport {
        representation: representation_name(h),
        node_count: h.node_count(),
        edge_count: h.edge_count().to_string(),
        size_counts,
        skipped_lines: built.skipped_lines,
    };
    Ok((report, built))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub node_count: usize,
    pub edge_count: String,
    pub skipped_lines: usize,
    pub t_star: u64,
    pub stop_reason: StopReason,
    pub converged: bool,
    pub clusters: Vec<ClusterReport>,
    pub initial_mean: f64,
    pub mean_drift: f64,
    pub updates: u64,
    pub jump_total: u64,
    pub jump_steps: usize,
    pub final_global_discordance: f64,
    pub absorbing: Option<bool>,
}

/// One simulation on the configured hypergraph; `observer` sees the snapshots.
pub fn single_run(cfg: &ExperimentConfig, observer: impl FnMut(&OpinionState)) -> Result<RunReport> {
    let built = cfg.build_hypergraph()?;
    let h = &built.hypergraph;
    let sim = Simulation::from_rng(h, &cfg.model.sim_config(cfg.seed), trial_rng(cfg.seed, 0))?;
    let s = sim.run_with_observer(observer)?;
    Ok(RunReport {
        node_count: h.node_count(),
        edge_count: h.edge_count().to_string(),
        skipped_lines: built.skipped_lines,
        t_star: s.t_star,
        stop_reason: s.stop_reason,
        converged: s.converged(),
        clusters: cluster_reports(&s.clusters),
        initial_mean: s.initial_mean,
        mean_drift: s.mean_drift,
        updates: s.updates,
        jump_total: s.jump_total,
        jump_steps: s.jump_events.len(),
        final_global_discordance: s.final_global_discordance,
        absorbing: final_absorbing(h, s.final_state.opinions(), cfg)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusRow {
    pub trial: u64,
    pub t_star: u64,
    pub stop_reason: StopReason,
    pub cluster_count: usize,
    pub largest_cluster_value: f64,
    pub largest_cluster_size: usize,
    pub initial_mean: f64,
    pub mean_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub trials: u64,
    pub consensus_count: u64,
    pub cutoff_count: u64,
    /// Largest `|gamma - mean(x(0))|` over consensus trials.
    pub max_consensus_deviation: f64,
    #[serde(skip)]
    pub rows: Vec<CensusRow>,
}

fn census_row(trial: u64, s: &SimSummary) -> CensusRow {
    let largest = s
        .clusters
        .clusters()
        .iter()
        .max_by_key(|c| c.size)
        .expect("non-empty state");
    CensusRow {
        trial,
        t_star: s.t_star,
        stop_reason: s.stop_reason,
        cluster_count: s.clusters.len(),
        largest_cluster_value: largest.value,
        largest_cluster_size: largest.size,
        initial_mean: s.initial_mean,
        mean_drift: s.mean_drift,
    }
}

/// Independent trials on one hypergraph, counting consensus outcomes.
pub fn census(cfg: &ExperimentConfig) -> Result<CensusReport> {
    let h = cfg.build_hypergraph()?.hypergraph;
    let sim_cfg = cfg.model.sim_config(cfg.seed);
    let rows: Vec<CensusRow> = cfg.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let s = Simulation::from_rng(&h, &sim_cfg, trial_rng(cfg.seed, t))?.run()?;
                Ok(census_row(t, &s))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let consensus: Vec<&CensusRow> = rows
        .iter()
        .filter(|r| r.cluster_count == 1 && r.stop_reason != StopReason::Cutoff)
        .collect();
    Ok(CensusReport {
        trials: cfg.trials,
        consensus_count: consensus.len() as u64,
        cutoff_count: rows.iter().filter(|r| r.stop_reason == StopReason::Cutoff).count() as u64,
        max_consensus_deviation: consensus
            .iter()
            .map(|r| (r.largest_cluster_value - r.initial_mean).abs())
            .fold(0.0, f64::max),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub trial: u64,
    pub t_star: u64,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaStats {
    pub sigma: f64,
    pub trials: u64,
    pub mean_t_star: f64,
    pub std_t_star: f64,
    pub median_t_star: f64,
    pub cutoffs: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub stats: Vec<SigmaStats>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

/// Convergence time against the spread of normally distributed initial opinions.
/// The stop rule is `d(V, x) < epsilon` with the sweep cutoff; the model's own
/// stop rule and initial distribution are replaced.
pub fn sweep_sigma(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::invalid("missing sweep section"))?;
    let grid = sweep.grid()?;
    let h = cfg.build_hypergraph()?.hypergraph;
    let trials = cfg.trials;
    let jobs: Vec<(usize, u64)> = (0..grid.len()).flat_map(|k| (0..trials).map(move |t| (k, t))).collect();
    let rows: Vec<SweepRow> = cfg.install(|| {
        jobs.par_iter()
            .map(|&(k, t)| {
                let sigma = grid[k];
                let mut model = cfg.model.clone();
                model.init = InitialDistribution::Normal { mu: 0.0, sigma };
                model.stop = StopRule::any([
                    StopRule::GlobalDiscordanceBelow { epsilon: sweep.epsilon },
                    StopRule::MaxSteps { steps: sweep.cutoff },
                ]);
                let stream = k as u64 * trials + t;
                let s = Simulation::from_rng(&h, &model.sim_config(cfg.seed), trial_rng(cfg.seed, stream))?.run()?;
                Ok(SweepRow {
                    sigma,
                    trial: t,
                    t_star: s.t_star,
                    stop_reason: s.stop_reason,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let stats = grid
        .iter()
        .enumerate()
        .map(|(k, &sigma)| {
            let chunk = &rows[k * trials as usize..(k + 1) * trials as usize];
            let ts: Vec<f64> = chunk.iter().map(|r| r.t_star as f64).collect();
            let w: Welford = ts.iter().copied().collect();
            SigmaStats {
                sigma,
                trials,
                mean_t_star: w.mean(),
                std_t_star: w.sample_variance().sqrt(),
                median_t_star: median(&ts).unwrap_or(f64::NAN),
                cutoffs: chunk.iter().filter(|r| r.stop_reason == StopReason::Cutoff).count() as u64,
            }
        })
        .collect();
    Ok(SweepReport { stats, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct EstarReport {
    pub fit: Option<LinearFit>,
    #[serde(skip)]
    pub table: Vec<ConcordanceEstimate>,
    #[serde(skip)]
    pub curve: Vec<(usize, f64)>,
}

/// Concordance estimates for sizes `2..=max_nodes`, then `E[|e*|]` for every `N`.
pub fn estar(cfg: &ExperimentConfig) -> Result<EstarReport> {
    let p = cfg.estar.as_ref().ok_or_else(|| Error::invalid("missing estar section"))?;
    let sizes: Vec<usize> = (2..=p.max_nodes).collect();
    let table = cfg.install(|| concordance_table(&sizes, &cfg.model.init, cfg.model.c, p.trials_per_size, cfg.seed))??;
    let a_hat: Vec<f64> = table.iter().map(|e| e.a_hat).collect();
    let curve = estar_curve(&a_hat, p.max_nodes);
    let xs: Vec<f64> = curve.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = curve.iter().map(|&(_, e)| e).collect();
    Ok(EstarReport {
        fit: linear_fit(&xs, &ys),
        table,
        curve,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpRow {
    pub sigma: f64,
    pub hypergraph_id: usize,
    /// The `x` in `m_n = C(N, n) x^n`.
    pub x: f64,
    pub edge_count: f64,
    /// Whether the hyperedges were materialized or drawn through the size distribution.
    pub explicit: bool,
    pub mean_edge_size: f64,
    pub mean_j0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpFit {
    pub sigma: f64,
    pub fit: Option<LinearFit>,
    /// `p * a` from the single-opinion tail and the limiting concordance.
    pub predicted_slope: f64,
    pub mean_j0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpsReport {
    pub fits: Vec<JumpFit>,
    #[serde(skip)]
    pub rows: Vec<JumpRow>,
}

/// Per-size hyperedge counts `m_n = C(N, n) x^n`, rounded where they fit exactly in a double.
fn gnm_power_counts(nodes: usize, x: f64) -> Vec<f64> {
    let mut m = vec![0.0; nodes + 1];
    for (n, slot) in m.iter_mut().enumerate().skip(2) {
        let v = (ln_binomial(nodes as u64, n as u64) + n as f64 * x.ln()).exp();
        *slot = if v < 1e15 { v.round() } else { v };
    }
    m
}

fn jump_hypergraph_row(cfg: &ExperimentConfig, sigma: f64, id: usize, stream: u64) -> Result<JumpRow> {
    let p = cfg.jumps.as_ref().expect("validated");
    let n = p.nodes;
    let mut rng = trial_rng(cfg.seed, stream);
    let (x, counts) = loop {
        let x: f64 = rng.gen();
        let counts = gnm_power_counts(n, x);
        if counts.iter().sum::<f64>() >= 1.0 {
            break (x, counts);
        }
    };
    let total: f64 = counts.iter().sum();
    let mean_edge_size = counts.iter().enumerate().map(|(k, &m)| k as f64 * m).sum::<f64>() / total;
    let dist = InitialDistribution::Normal { mu: 0.0, sigma };
    let explicit = total <= p.explicit_edge_cap as f64;
    let mut buf: Vec<NodeId> = Vec::new();
    let mut opinions = vec![0.0; n];
    let mut jumps = 0u64;
    if explicit {
        let m = counts.iter().enumerate().filter(|(_, &m)| m > 0.0).map(|(k, &m)| (k, m as u64));
        let h = gen_gnm(&GnmParams::new(n, m), &mut rng)?;
        for _ in 0..p.trials {
            dist.fill(&mut rng, &mut opinions);
            h.sample_into(&mut rng, &mut buf)?;
            jumps += apply_update(&buf, &mut opinions, cfg.model.c, cfg.model.alpha).1 as u64;
        }
    } else {
        let sizes = WeightedIndex::new(&counts).map_err(|e| Error::invalid(format!("size weights: {e}")))?;
        for _ in 0..p.trials {
            dist.fill(&mut rng, &mut opinions);
            let size = sizes.sample(&mut rng);
            sample_k_subset(&mut rng, n, size, &mut buf);
            jumps += apply_update(&buf, &mut opinions, cfg.model.c, cfg.model.alpha).1 as u64;
        }
    }
    Ok(JumpRow {
        sigma,
        hypergraph_id: id,
        x,
        edge_count: total,
        explicit,
        mean_edge_size,
        mean_j0: jumps as f64 / p.trials as f64,
    })
}

/// Mean number of opinion jumps in one step against mean hyperedge size, over
/// random `G(N, m)` hypergraphs with `m_n = C(N, n) x^n`.
///
/// Every trial redraws all opinions, so the jump count depends on the hypergraph
/// only through the size of the selected hyperedge. Hypergraphs too large to
/// materialize are therefore sampled by drawing a size from `m_n` and then a
/// uniform subset of that size.
pub fn jumps(cfg: &ExperimentConfig) -> Result<JumpsReport> {
    let p = cfg.jumps.as_ref().ok_or_else(|| Error::invalid("missing jumps section"))?;
    let jobs: Vec<(usize, usize)> = (0..p.sigmas.len())
        .flat_map(|s| (0..p.hypergraphs).map(move |l| (s, l)))
        .collect();
    let rows: Vec<JumpRow> = cfg.install(|| {
        jobs.par_iter()
            .map(|&(s, l)| jump_hypergraph_row(cfg, p.sigmas[s], l, (s * p.hypergraphs + l) as u64))
            .collect::<Result<Vec<_>>>()
    })??;
    let fits = p
        .sigmas
        .iter()
        .enumerate()
        .map(|(s, &sigma)| {
            let chunk = &rows[s * p.hypergraphs..(s + 1) * p.hypergraphs];
            let xs: Vec<f64> = chunk.iter().map(|r| r.mean_edge_size).collect();
            let ys: Vec<f64> = chunk.iter().map(|r| r.mean_j0).collect();
            let dist = InitialDistribution::Normal { mu: 0.0, sigma };
            JumpFit {
                sigma,
                fit: linear_fit(&xs, &ys),
                predicted_slope: single_jump_probability(&dist, cfg.model.c)
                    * limiting_concordance(sigma * sigma, cfg.model.c),
                mean_j0: kahan_mean(&ys),
            }
        })
        .collect();
    Ok(JumpsReport { fits, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct CommunityReport {
    pub community: usize,
    pub size: usize,
    pub clusters: Vec<ClusterReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarizationTrial {
    pub trial: u64,
    pub t_star: u64,
    pub stop_reason: StopReason,
    pub clusters: Vec<ClusterReport>,
    pub communities: Vec<CommunityReport>,
    pub absorbing: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarizationReport {
    pub trials: Vec<PolarizationTrial>,
    pub absorbing_count: u64,
    pub cutoff_count: u64,
}

/// Runs on an HSBM with community-specific initial opinions and reports the
/// clusters inside each community and whether the final state is absorbing.
pub fn polarization(cfg: &ExperimentConfig) -> Result<PolarizationReport> {
    let p = cfg.polarization.as_ref().ok_or_else(|| Error::invalid("missing polarization section"))?;
    let Some(HypergraphSpec::Hsbm { params, .. }) = &cfg.hypergraph else {
        return Err(Error::invalid("polarization needs an hsbm hypergraph"));
    };
    let partition = params.partition()?;
    let h = cfg.build_hypergraph()?.hypergraph;
    let sim_cfg = cfg.model.sim_config(cfg.seed);
    let trials: Vec<PolarizationTrial> = cfg.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg.seed, t);
                let x: Vec<f64> = (0..h.node_count() as NodeId)
                    .map(|v| p.community_init[partition.community_of(v)].sample(&mut rng))
                    .collect();
                let s = Simulation::with_state(&h, &sim_cfg, OpinionState::new(x)?, rng)?.run()?;
                let x = s.final_state.opinions();
                let communities = (0..partition.community_count())
                    .map(|k| {
                        let xs: Vec<f64> = partition.members(k).iter().map(|&v| x[v as usize]).collect();
                        CommunityReport {
                            community: k,
                            size: xs.len(),
                            clusters: cluster_reports(&extract_clusters(&xs, cfg.model.cluster_tol)),
                        }
                    })
                    .collect();
                Ok(PolarizationTrial {
                    trial: t,
                    t_star: s.t_star,
                    stop_reason: s.stop_reason,
                    clusters: cluster_reports(&s.clusters),
                    communities,
                    absorbing: final_absorbing(&h, x, cfg)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(PolarizationReport {
        absorbing_count: trials.iter().filter(|t| t.absorbing == Some(true)).count() as u64,
        cutoff_count: trials.iter().filter(|t| t.stop_reason == StopReason::Cutoff).count() as u64,
        trials,
    })
}
