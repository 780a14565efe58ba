//! The bounded-confidence process: discordance, the asynchronous update step,
//! the simulation loop and absorbing-state detection.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analysis::clusters::{extract_clusters, ClusterSet, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph, MixedEdges, NodeId, Representation};
use crate::stats::{kahan_mean, KahanSum, SimRng, Welford};

/// Tolerance below which a discordance counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Resampling budget for the conditioned first pick.
const MAX_FIRST_PICK_ATTEMPTS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq)]
pub struct OpinionState {
    opinions: Vec<f64>,
    time: u64,
}

impl OpinionState {
    pub fn new(opinions: Vec<f64>) -> Result<Self> {
        if let Some(i) = opinions.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(OpinionState { opinions, time: 0 })
    }

    pub fn opinions(&self) -> &[f64] {
        &self.opinions
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }

    pub fn mean(&self) -> f64 {
        kahan_mean(&self.opinions)
    }

    /// Discordance of the all-nodes hyperedge, `d(V, x)`.
    pub fn global_discordance(&self) -> f64 {
        self.opinions
            .iter()
            .copied()
            .collect::<Welford>()
            .sample_variance()
    }

    pub fn into_opinions(self) -> Vec<f64> {
        self.opinions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDistribution {
    Uniform { a: f64, b: f64 },
    Normal { mu: f64, sigma: f64 },
}

impl InitialDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialDistribution::Uniform { a, b } if !(a < b) => {
                Err(Error::invalid(format!("uniform bounds need a < b, got [{a}, {b}]")))
            }
            InitialDistribution::Normal { sigma, .. } if !(sigma > 0.0) => {
                Err(Error::invalid(format!("normal sigma must be positive, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            InitialDistribution::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            InitialDistribution::Normal { sigma, .. } => sigma * sigma,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            InitialDistribution::Uniform { a, b } => 0.5 * (a + b),
            InitialDistribution::Normal { mu, .. } => mu,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitialDistribution::Uniform { a, b } => rng.gen_range(a..b),
            InitialDistribution::Normal { mu, sigma } => {
                Normal::new(mu, sigma).expect("validated sigma").sample(rng)
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        match *self {
            InitialDistribution::Uniform { a, b } => (0..n).map(|_| rng.gen_range(a..b)).collect(),
            InitialDistribution::Normal { mu, sigma } => {
                let d = Normal::new(mu, sigma).expect("validated sigma");
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }

    /// Fills `out` with fresh draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            InitialDistribution::Uniform { a, b } => out.iter_mut().for_each(|x| *x = rng.gen_range(a..b)),
            InitialDistribution::Normal { mu, sigma } => {
                let d = Normal::new(mu, sigma).expect("validated sigma");
                out.iter_mut().for_each(|x| *x = d.sample(rng));
            }
        }
    }
}

/// When to stop a run. `Any` stops at the first member rule that fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopRule {
    /// Check for an absorbing state every `every` steps; `None` picks the default
    /// (`|E|` for explicit hypergraphs, `N` for implicit ones).
    AbsorbingCheck {
        #[serde(default)]
        every: Option<u64>,
    },
    /// Stop once `d(V, x) < epsilon`.
    GlobalDiscordanceBelow { epsilon: f64 },
    MaxSteps { steps: u64 },
    Any { rules: Vec<StopRule> },
}

impl StopRule {
    pub fn any(rules: impl IntoIterator<Item = StopRule>) -> Self {
        StopRule::Any {
            rules: rules.into_iter().collect(),
        }
    }

    fn flatten(&self, out: &mut StopCriteria) -> Result<()> {
        match self {
            StopRule::AbsorbingCheck { every } => {
                if *every == Some(0) {
                    return Err(Error::invalid("absorbing check interval must be at least 1"));
                }
                out.absorbing = Some(every.unwrap_or(0));
            }
            StopRule::GlobalDiscordanceBelow { epsilon } => {
                if !(*epsilon >= 0.0) {
                    return Err(Error::invalid("epsilon must be non-negative"));
                }
                out.epsilon = Some(out.epsilon.map_or(*epsilon, |e| e.max(*epsilon)));
            }
            StopRule::MaxSteps { steps } => {
                out.max_steps = Some(out.max_steps.map_or(*steps, |s| s.min(*steps)));
            }
            StopRule::Any { rules } => {
                for r in rules {
                    r.flatten(out)?;
                }
            }
        }
        Ok(())
    }

    /// Step cap if the rule has one.
    pub fn max_steps(&self) -> Option<u64> {
        let mut c = StopCriteria::default();
        self.flatten(&mut c).ok()?;
        c.max_steps
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct StopCriteria {
    /// `Some(0)` means "default interval".
    absorbing: Option<u64>,
    epsilon: Option<f64>,
    max_steps: Option<u64>,
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Confidence bound; a hyperedge is concordant when its discordance is strictly below it.
    pub c: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub init: InitialDistribution,
    pub seed: u64,
    pub stop: StopRule,
    /// Resample the time-0 hyperedge until it is concordant.
    #[serde(default)]
    pub condition_first_pick_concordant: bool,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    #[serde(default = "default_cluster_tol")]
    pub cluster_tol: f64,
    /// Snapshot interval for trajectory observers; `None` snapshots after every update.
    #[serde(default)]
    pub snapshot_every: Option<u64>,
}

impl SimConfig {
    pub fn new(c: f64, init: InitialDistribution, seed: u64, stop: StopRule) -> Self {
        SimConfig {
            c,
            alpha: 1.0,
            init,
            seed,
            stop,
            condition_first_pick_concordant: false,
            zero_tol: DEFAULT_ZERO_TOL,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            snapshot_every: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::invalid(format!("confidence bound must be positive, got {}", self.c)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.zero_tol >= 0.0) || !(self.cluster_tol >= 0.0) {
            return Err(Error::invalid("tolerances must be non-negative"));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::invalid("snapshot interval must be at least 1"));
        }
        self.init.validate()?;
        self.stop.flatten(&mut StopCriteria::default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub selected: Hyperedge,
    pub updated: bool,
    /// Members whose opinion moved by more than `c`.
    pub jumps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The state was verified absorbing.
    Absorbed,
    /// `d(V, x)` fell below the configured threshold.
    Converged,
    /// The step cap was reached first. Never counts as convergence.
    Cutoff,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Absorbed => "absorbed",
            StopReason::Converged => "converged",
            StopReason::Cutoff => "cutoff",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub t: u64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct SimSummary {
    pub seed: u64,
    /// Time at which the run stopped.
    pub t_star: u64,
    pub stop_reason: StopReason,
    pub initial_mean: f64,
    pub final_state: OpinionState,
    pub clusters: ClusterSet,
    /// `|mean(x(t*)) - mean(x(0))|`.
    pub mean_drift: f64,
    pub updates: u64,
    pub jump_total: u64,
    /// Steps with at least one jump.
    pub jump_events: Vec<JumpEvent>,
    pub final_global_discordance: f64,
}

impl SimSummary {
    pub fn converged(&self) -> bool {
        self.stop_reason != StopReason::Cutoff
    }
}

/// `d_alpha(e, x) = (1/(|e|-1))^alpha * sum_{i in e} (x_i - mean_e)^2`.
pub fn discordance(members: &[NodeId], opinions: &[f64], alpha: f64) -> Result<f64> {
    if members.len() < 2 {
        return Err(Error::EdgeTooSmall(members.len()));
    }
    Ok(discordance_unchecked(members, opinions, alpha))
}

#[inline]
fn discordance_unchecked(members: &[NodeId], opinions: &[f64], alpha: f64) -> f64 {
    let mut w = Welford::new();
    for &m in members {
        w.push(opinions[m as usize]);
    }
    let ss = w.sum_sq_dev();
    let n1 = (members.len() - 1) as f64;
    if alpha == 1.0 {
        ss / n1
    } else if alpha == 0.0 {
        ss
    } else {
        ss * n1.powf(-alpha)
    }
}

/// Applies the update rule for a given hyperedge. Returns `(updated, jumps)`.
pub(crate) fn apply_update(members: &[NodeId], opinions: &mut [f64], c: f64, alpha: f64) -> (bool, usize) {
    if discordance_unchecked(members, opinions, alpha) >= c {
        return (false, 0);
    }
    let sum: KahanSum = members.iter().map(|&m| opinions[m as usize]).collect();
    let mean = sum.total() / members.len() as f64;
    let mut jumps = 0;
    for &m in members {
        let x = &mut opinions[m as usize];
        if (mean - *x).abs() > c {
            jumps += 1;
        }
        *x = mean;
    }
    (true, jumps)
}

/// Applies the update rule to a chosen hyperedge and advances time by one.
pub fn apply_edge(state: &mut OpinionState, edge: &Hyperedge, c: f64, alpha: f64) -> StepOutcome {
    let (updated, jumps) = apply_update(edge.members(), &mut state.opinions, c, alpha);
    state.time += 1;
    StepOutcome {
        selected: edge.clone(),
        updated,
        jumps,
    }
}

/// One asynchronous step: draw a hyperedge uniformly and update if concordant.
pub fn step<R: Rng + ?Sized>(
    h: &Hypergraph,
    state: &mut OpinionState,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<StepOutcome> {
    check_state(h, state)?;
    let e = h.sample_uniform_hyperedge(rng)?;
    Ok(apply_edge(state, &e, cfg.c, cfg.alpha))
}

fn check_state(h: &Hypergraph, state: &OpinionState) -> Result<()> {
    if state.len() != h.node_count() {
        return Err(Error::StateLength {
            expected: h.node_count(),
            got: state.len(),
        });
    }
    Ok(())
}

/// True iff every listed hyperedge has discordance `>= c` or `<= zero_tol`.
pub fn is_absorbing_explicit(h: &Hypergraph, opinions: &[f64], c: f64, zero_tol: f64) -> Result<bool> {
    let list = h.edge_list().ok_or(Error::NotExplicit)?;
    Ok(list.iter().all(|e| {
        let d = discordance_unchecked(e, opinions, 1.0);
        d >= c || d <= zero_tol
    }))
}

/// Decides absorption of an exactly clustered state on an implicit hypergraph
/// without enumerating hyperedges.
///
/// Among hyperedges that mix two clusters `i` and `j` with `a` and `b` members,
/// the discordance is `a*b*(g_i-g_j)^2 / (n(n-1))`, smallest at one dominant
/// cluster plus a single outsider: `(g_i-g_j)^2 / (a+1)`. Hyperedges touching
/// three or more clusters never do better, since dropping the member farthest
/// from the mean does not raise the sample variance. Each category of hyperedges
/// therefore reduces to a scan over cluster pairs.
pub fn is_absorbing_clustered(clusters: &ClusterSet, h: &Hypergraph, c: f64) -> Result<bool> {
    if !clusters.is_exact() {
        return Err(Error::NotClustered {
            spread: clusters.max_spread(),
            tolerance: clusters.tolerance(),
        });
    }
    if clusters.node_count() != h.node_count() {
        return Err(Error::StateLength {
            expected: h.node_count(),
            got: clusters.node_count(),
        });
    }
    if clusters.len() <= 1 {
        return Ok(true);
    }
    let values = clusters.values();
    let sizes = clusters.sizes();
    match h.representation() {
        Representation::Explicit(_) => Err(Error::Unsupported(
            "clustered absorption check needs an implicit hypergraph; use is_absorbing_explicit".into(),
        )),
        Representation::Complete => Ok(pairs_absorbing(&values, &sizes, usize::MAX, c)),
        Representation::Block(b) => {
            let part = b.partition();
            let k = part.community_count();
            // counts[i][q]: members of cluster i in community q.
            let mut counts = vec![vec![0usize; k]; clusters.len()];
            for (i, cl) in clusters.clusters().iter().enumerate() {
                for &m in &cl.members {
                    counts[i][part.community_of(m)] += 1;
                }
            }
            let all_complete = b.intra_complete().iter().all(|&f| f);
            for q in 0..k {
                if !b.intra_complete()[q] {
                    continue;
                }
                let (vals, szs): (Vec<f64>, Vec<usize>) = (0..clusters.len())
                    .filter(|&i| counts[i][q] > 0)
                    .map(|i| (values[i], counts[i][q]))
                    .unzip();
                if !pairs_absorbing(&vals, &szs, usize::MAX, c) {
                    return Ok(false);
                }
            }
            match b.mixed() {
                MixedEdges::None => Ok(true),
                MixedEdges::All => {
                    if !all_complete {
                        return Err(Error::Unsupported(
                            "mixed-all rule with an incomplete community".into(),
                        ));
                    }
                    // Complete communities plus every mixed subset is the complete hypergraph.
                    Ok(pairs_absorbing(&values, &sizes, usize::MAX, c))
                }
                MixedEdges::UpToSize(max) => {
                    if !all_complete {
                        return Err(Error::Unsupported(
                            "bounded mixed rule with an incomplete community".into(),
                        ));
                    }
                    let hosts: Vec<Vec<usize>> = counts
                        .iter()
                        .map(|row| (0..k).filter(|&q| row[q] > 0).collect())
                        .collect();
                    for i in 0..values.len() {
                        for j in (i + 1)..values.len() {
                            let spans = hosts[i].len() > 1
                                || hosts[j].len() > 1
                                || hosts[i][0] != hosts[j][0];
                            if !spans {
                                continue;
                            }
                            let dominant = sizes[i].max(sizes[j]).min(max - 1);
                            let d = (values[i] - values[j]).powi(2) / (dominant + 1) as f64;
                            if d < c {
                                return Ok(false);
                            }
                        }
                    }
                    Ok(true)
                }
                MixedEdges::Catalog(list) => {
                    let mut label = vec![0usize; h.node_count()];
                    for (i, cl) in clusters.clusters().iter().enumerate() {
                        for &m in &cl.members {
                            label[m as usize] = i;
                        }
                    }
                    let x: Vec<f64> = label.iter().map(|&i| values[i]).collect();
                    Ok(list.iter().all(|e| {
                        let unanimous = e.iter().all(|&m| label[m as usize] == label[e[0] as usize]);
                        unanimous || discordance_unchecked(e, &x, 1.0) >= c
                    }))
                }
            }
        }
    }
}

/// No pair of clusters admits a concordant mixed hyperedge with at most `max_size` members.
fn pairs_absorbing(values: &[f64], sizes: &[usize], max_size: usize, c: f64) -> bool {
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let dominant = sizes[i].max(sizes[j]).min(max_size.saturating_sub(1));
            if (values[i] - values[j]).powi(2) / ((dominant + 1) as f64) < c {
                return false;
            }
        }
    }
    true
}

/// A single simulation: owns the opinion state and its random stream.
pub struct Simulation<'h> {
    graph: &'h Hypergraph,
    cfg: SimConfig,
    state: OpinionState,
    rng: SimRng,
    buf: Vec<NodeId>,
}

impl<'h> Simulation<'h> {
    /// Draws the initial opinions from `cfg.init` using the stream seeded by `cfg.seed`.
    pub fn new(graph: &'h Hypergraph, cfg: &SimConfig) -> Result<Self> {
        Self::from_rng(graph, cfg, crate::stats::trial_rng(cfg.seed, 0))
    }

    /// Like [`Self::new`] but with a caller-provided stream.
    pub fn from_rng(graph: &'h Hypergraph, cfg: &SimConfig, mut rng: SimRng) -> Result<Self> {
        cfg.validate()?;
        let opinions = cfg.init.sample_n(&mut rng, graph.node_count());
        Self::with_state(graph, cfg, OpinionState::new(opinions)?, rng)
    }

    /// Starts from a given state; `rng` drives hyperedge selection.
    pub fn with_state(graph: &'h Hypergraph, cfg: &SimConfig, state: OpinionState, rng: SimRng) -> Result<Self> {
        cfg.validate()?;
        check_state(graph, &state)?;
        Ok(Simulation {
            graph,
            cfg: cfg.clone(),
            state,
            rng,
            buf: Vec::new(),
        })
    }

    pub fn state(&self) -> &OpinionState {
        &self.state
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Draws and applies one hyperedge. Returns `(updated, jumps)`.
    pub fn step_in_place(&mut self) -> Result<(bool, usize)> {
        self.graph.sample_into(&mut self.rng, &mut self.buf)?;
        let r = apply_update(&self.buf, &mut self.state.opinions, self.cfg.c, self.cfg.alpha);
        self.state.time += 1;
        Ok(r)
    }

    /// Members of the most recently drawn hyperedge.
    pub fn last_edge(&self) -> &[NodeId] {
        &self.buf
    }

    pub fn step(&mut self) -> Result<StepOutcome> {
        let (updated, jumps) = self.step_in_place()?;
        Ok(StepOutcome {
            selected: Hyperedge::new(self.buf.iter().copied())?,
            updated,
            jumps,
        })
    }

    /// Resamples until a concordant hyperedge turns up, then applies it as one step.
    fn concordant_first_step(&mut self) -> Result<(bool, usize)> {
        for _ in 0..MAX_FIRST_PICK_ATTEMPTS {
            self.graph.sample_into(&mut self.rng, &mut self.buf)?;
            if discordance_unchecked(&self.buf, &self.state.opinions, self.cfg.alpha) < self.cfg.c {
                let r = apply_update(&self.buf, &mut self.state.opinions, self.cfg.c, self.cfg.alpha);
                self.state.time += 1;
                return Ok(r);
            }
        }
        Err(Error::NoConcordantPick(MAX_FIRST_PICK_ATTEMPTS))
    }

    /// Absorbing check appropriate to the representation. `None` means undecidable
    /// here (an implicit hypergraph whose state is not exactly clustered).
    pub fn check_absorbing(&self) -> Result<Option<bool>> {
        if self.graph.is_explicit() {
            return is_absorbing_explicit(self.graph, &self.state.opinions, self.cfg.c, self.cfg.zero_tol).map(Some);
        }
        let clusters = extract_clusters(&self.state.opinions, self.cfg.cluster_tol);
        if !clusters.is_exact() {
            return Ok(None);
        }
        is_absorbing_clustered(&clusters, self.graph, self.cfg.c).map(Some)
    }

    pub fn run(self) -> Result<SimSummary> {
        self.run_with_observer(|_| {})
    }

    /// Runs until the stop rule fires, calling `observer` on the initial state,
    /// on snapshots, and on the final state.
    pub fn run_with_observer(mut self, mut observer: impl FnMut(&OpinionState)) -> Result<SimSummary> {
        let mut crit = StopCriteria::default();
        self.cfg.stop.flatten(&mut crit)?;
        let absorbing_every = crit.absorbing.map(|k| {
            if k > 0 {
                k
            } else if let Some(list) = self.graph.edge_list() {
                (list.len() as u64).max(1)
            } else {
                self.graph.node_count() as u64
            }
        });
        let snapshot = self.cfg.snapshot_every;

        let initial_mean = self.state.mean();
        let start = self.state.time;
        let mut updates = 0u64;
        let mut jump_total = 0u64;
        let mut jump_events = Vec::new();
        let mut dirty = true;
        let mut last_snapshot = start;
        observer(&self.state);

        let reason = loop {
            let elapsed = self.state.time - start;
            if let Some(every) = absorbing_every {
                if dirty && elapsed.is_multiple_of(every) {
                    dirty = false;
                    if self.check_absorbing()? == Some(true) {
                        break StopReason::Absorbed;
                    }
                }
            }
            if let Some(eps) = crit.epsilon {
                if elapsed == 0 && self.state.global_discordance() < eps {
                    break StopReason::Converged;
                }
            }
            if crit.max_steps.is_some_and(|m| elapsed >= m) {
                break StopReason::Cutoff;
            }

            let (updated, jumps) = if elapsed == 0 && self.cfg.condition_first_pick_concordant {
                self.concordant_first_step()?
            } else {
                self.step_in_place()?
            };
            if updated {
                updates += 1;
                dirty = true;
                if jumps > 0 {
                    jump_total += jumps as u64;
                    jump_events.push(JumpEvent {
                        t: self.state.time - 1,
                        count: jumps,
                    });
                }
            }
            let take_snapshot = match snapshot {
                Some(k) => (self.state.time - start).is_multiple_of(k),
                None => updated,
            };
            if take_snapshot {
                observer(&self.state);
                last_snapshot = self.state.time;
            }
            if updated {
                if let Some(eps) = crit.epsilon {
                    if self.state.global_discordance() < eps {
                        break StopReason::Converged;
                    }
                }
            }
        };
        if last_snapshot != self.state.time {
            observer(&self.state);
        }

        let final_mean = self.state.mean();
        let clusters = extract_clusters(&self.state.opinions, self.cfg.cluster_tol);
        let final_global_discordance = self.state.global_discordance();
        Ok(SimSummary {
            seed: self.cfg.seed,
            t_star: self.state.time - start,
            stop_reason: reason,
            initial_mean,
            mean_drift: (final_mean - initial_mean).abs(),
            final_state: self.state,
            clusters,
            updates,
            jump_total,
            jump_events,
            final_global_discordance,
        })
    }
}

/// Draws initial opinions from `cfg.init` and runs until the stop rule fires.
pub fn run(h: &Hypergraph, cfg: &SimConfig) -> Result<SimSummary> {
    Simulation::new(h, cfg)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Partition;
    use crate::stats::trial_rng;

    fn edge(v: &[NodeId]) -> Hyperedge {
        Hyperedge::new(v.iter().copied()).unwrap()
    }

    fn state(x: &[f64]) -> OpinionState {
        OpinionState::new(x.to_vec()).unwrap()
    }

    fn cfg(c: f64, stop: StopRule) -> SimConfig {
        SimConfig::new(c, InitialDistribution::Uniform { a: 0.0, b: 1.0 }, 1, stop)
    }

    /// Independent two-pass variance.
    fn two_pass(xs: &[f64]) -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    }

    #[test]
    fn mediator_example() {
        let x = [0.0, 1.0, 0.5];
        assert!((discordance(&[0, 1], &x, 1.0).unwrap() - 0.5).abs() <= 1e-15);
        assert!((discordance(&[0, 1, 2], &x, 1.0).unwrap() - 0.25).abs() <= 1e-15);
    }

    #[test]
    fn discordance_equal_and_oracle() {
        assert_eq!(discordance(&[0, 1, 2], &[3.3, 3.3, 3.3], 1.0).unwrap(), 0.0);
        let x = [0.0, 2.0, 4.0, 6.0];
        let d = discordance(&[0, 1, 2, 3], &x, 1.0).unwrap();
        assert!((d - two_pass(&x)).abs() < 1e-14);
        assert!((d - 20.0 / 3.0).abs() < 1e-14);
        assert!(matches!(discordance(&[0], &x, 1.0), Err(Error::EdgeTooSmall(1))));
    }

    #[test]
    fn forced_steps() {
        let mut s = state(&[0.0, 0.1, 0.7]);
        let out = apply_edge(&mut s, &edge(&[0, 1]), 1.0, 1.0);
        assert!(out.updated);
        assert_eq!(out.jumps, 0);
        assert_eq!(s.opinions()[0], s.opinions()[1]);
        assert!((s.opinions()[0] - 0.05).abs() < 1e-17);
        assert_eq!(s.time(), 1);

        let mut s = state(&[0.0, 1.0, 0.5]);
        let out = apply_edge(&mut s, &edge(&[0, 1]), 0.3, 1.0);
        assert!(!out.updated);
        assert_eq!(out.jumps, 0);
        assert_eq!(s.opinions(), &[0.0, 1.0, 0.5]);
        assert_eq!(s.time(), 1);

        let mut s = state(&[0.0, 1.0, 0.5]);
        let out = apply_edge(&mut s, &edge(&[0, 1, 2]), 0.3, 1.0);
        assert!(out.updated);
        assert_eq!(s.opinions(), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn strict_inequality_at_bound() {
        // d = (1-0)^2/2 = 0.5 exactly, equal to c: discordant.
        let mut s = state(&[0.0, 1.0]);
        assert!(!apply_edge(&mut s, &edge(&[0, 1]), 0.5, 1.0).updated);
    }

    #[test]
    fn jump_counted() {
        // mean 1.0; node 2 moves by 2.0 > c while d = 4/3 * ... < c
        let mut s = state(&[0.6, 0.4, 3.0, 0.0]);
        let d = discordance(&[0, 1, 2, 3], s.opinions(), 1.0).unwrap();
        let out = apply_edge(&mut s, &edge(&[0, 1, 2, 3]), d + 0.1, 1.0);
        assert!(out.updated);
        assert_eq!(out.jumps, 1);
    }

    fn pair_graph() -> Hypergraph {
        Hypergraph::explicit(2, vec![edge(&[0, 1])]).unwrap()
    }

    #[test]
    fn run_absorbing_immediately() {
        let h = pair_graph();
        let cfg = cfg(1.0, StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps: 100 }]));
        let sim = Simulation::with_state(&h, &cfg, state(&[0.0, 10.0]), trial_rng(0, 0)).unwrap();
        let s = sim.run().unwrap();
        assert_eq!(s.t_star, 0);
        assert_eq!(s.stop_reason, StopReason::Absorbed);
        assert_eq!(s.clusters.values(), vec![0.0, 10.0]);
    }

    #[test]
    fn run_pair_consensus() {
        let h = pair_graph();
        let cfg = cfg(1.0, StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps: 100 }]));
        let sim = Simulation::with_state(&h, &cfg, state(&[0.0, 0.1]), trial_rng(0, 0)).unwrap();
        let s = sim.run().unwrap();
        assert_eq!(s.t_star, 1);
        assert_eq!(s.stop_reason, StopReason::Absorbed);
        assert!(s.clusters.is_consensus());
        assert!((s.clusters.values()[0] - 0.05).abs() < 1e-17);
    }

    #[test]
    fn cutoff_is_flagged() {
        // Triangle of pairs missing the 3-edge never becomes exactly absorbing in
        // general; a 5-step cap must report a cutoff.
        let h = Hypergraph::explicit(3, vec![edge(&[0, 1]), edge(&[1, 2]), edge(&[0, 2])]).unwrap();
        let cfg = cfg(1.0, StopRule::any([StopRule::AbsorbingCheck { every: Some(1) }, StopRule::MaxSteps { steps: 5 }]));
        let sim = Simulation::with_state(&h, &cfg, state(&[0.0, 0.5, 0.5]), trial_rng(0, 0)).unwrap();
        let s = sim.run().unwrap();
        assert_eq!(s.stop_reason, StopReason::Cutoff);
        assert!(!s.converged());
        assert_eq!(s.t_star, 5);
    }

    #[test]
    fn conditioned_first_pick_updates_at_time_zero() {
        let h = Hypergraph::complete(30).unwrap();
        let mut cfg = SimConfig::new(
            1.0,
            InitialDistribution::Normal { mu: 0.0, sigma: 1.2 },
            3,
            StopRule::MaxSteps { steps: 1 },
        );
        cfg.condition_first_pick_concordant = true;
        let s = run(&h, &cfg).unwrap();
        assert_eq!(s.updates, 1);
    }

    #[test]
    fn runs_are_reproducible() {
        let h = Hypergraph::complete(40).unwrap();
        let cfg = SimConfig::new(
            1.0,
            InitialDistribution::Normal { mu: 0.0, sigma: 1.2 },
            99,
            StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps: 100_000 }]),
        );
        let a = run(&h, &cfg).unwrap();
        let b = run(&h, &cfg).unwrap();
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.t_star, b.t_star);
    }

    #[test]
    fn absorbing_explicit_examples() {
        let tri = Hypergraph::explicit(3, vec![edge(&[0, 1, 2])]).unwrap();
        assert!(!is_absorbing_explicit(&tri, &[0.0, 1.0, 0.5], 0.3, DEFAULT_ZERO_TOL).unwrap());
        assert!(is_absorbing_explicit(&tri, &[0.2, 0.2, 0.2], 0.3, DEFAULT_ZERO_TOL).unwrap());

        // Two clusters {0,1} at 0 and {2,3} at 10, all pairs present.
        let pairs: Vec<Hyperedge> = (0..4u32)
            .flat_map(|i| ((i + 1)..4).map(move |j| edge(&[i, j])))
            .collect();
        let h = Hypergraph::explicit(4, pairs).unwrap();
        assert!(is_absorbing_explicit(&h, &[0.0, 0.0, 10.0, 10.0], 1.0, DEFAULT_ZERO_TOL).unwrap());
        assert!(matches!(
            is_absorbing_explicit(&Hypergraph::complete(3).unwrap(), &[0.0; 3], 1.0, 0.0),
            Err(Error::NotExplicit)
        ));
    }

    #[test]
    fn clustered_complete_examples() {
        let h = Hypergraph::complete(4).unwrap();
        // gamma = (0, 1), sizes (3, 1): worst mixed edge has d = 1/4.
        let cs = ClusterSet::from_values(&[0.0, 1.0], &[3, 1], DEFAULT_CLUSTER_TOL);
        assert!(is_absorbing_clustered(&cs, &h, 0.25).unwrap());
        assert!(!is_absorbing_clustered(&cs, &h, 0.2500001).unwrap());

        // |g_i - g_j| = sqrt(2c) with singletons: d = c exactly, absorbing.
        let h2 = Hypergraph::complete(2).unwrap();
        let cs = ClusterSet::from_values(&[0.0, 1.0], &[1, 1], DEFAULT_CLUSTER_TOL);
        assert!(is_absorbing_clustered(&cs, &h2, 0.5).unwrap());

        let one = ClusterSet::from_values(&[3.0], &[4], DEFAULT_CLUSTER_TOL);
        assert!(is_absorbing_clustered(&one, &h, 100.0).unwrap());
    }

    #[test]
    fn clustered_rejects_unclustered_state() {
        let h = Hypergraph::complete(10).unwrap();
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.9e-9).collect();
        let cs = extract_clusters(&xs, 1e-9);
        assert!(matches!(is_absorbing_clustered(&cs, &h, 1.0), Err(Error::NotClustered { .. })));
    }

    #[test]
    fn polarized_block_is_absorbing() {
        let part = Partition::from_sizes(&[500, 500]).unwrap();
        let h = Hypergraph::block(part, vec![true, true], MixedEdges::UpToSize(2)).unwrap();
        let mut x = vec![2.0; 500];
        x.extend(vec![-2.0; 500]);
        let cs = extract_clusters(&x, DEFAULT_CLUSTER_TOL);
        assert!(is_absorbing_clustered(&cs, &h, 1.0).unwrap());
        // Mixed pair d = 8: c just above 8 breaks it.
        assert!(!is_absorbing_clustered(&cs, &h, 8.5).unwrap());
    }

    #[test]
    fn stop_rule_validation() {
        let mut c = cfg(1.0, StopRule::AbsorbingCheck { every: Some(0) });
        assert!(c.validate().is_err());
        c.stop = StopRule::MaxSteps { steps: 3 };
        assert!(c.validate().is_ok());
        c.c = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn state_length_checked() {
        let h = pair_graph();
        let c = cfg(1.0, StopRule::MaxSteps { steps: 1 });
        assert!(matches!(
            Simulation::with_state(&h, &c, state(&[0.0]), trial_rng(0, 0)),
            Err(Error::StateLength { .. })
        ));
        assert!(matches!(OpinionState::new(vec![f64::NAN]), Err(Error::NonFinite(0))));
    }
}
