//! CSV and JSON writers. CSV files open with `# seed=` and `# config=` comment
//! lines; JSON files carry `seed` and `config` fields next to the report.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::{OpinionState, StopReason};
use crate::error::{Error, Result};
use crate::generators::write_hypergraph;
use crate::hypergraph::Hypergraph;

use super::pipelines::{CensusReport, EstarReport, GenerateReport, JumpsReport, PolarizationReport, RunReport, SweepReport};
use super::{ExperimentConfig, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryFormat {
    /// One row per (time, node): `t,node,opinion`.
    #[default]
    Long,
    /// One row per time: `t,x0,x1,...`.
    Wide,
}

/// Collects opinion snapshots during a run.
#[derive(Debug, Clone)]
pub struct TrajectoryBuffer {
    format: TrajectoryFormat,
    snapshots: Vec<(u64, Vec<f64>)>,
}

impl TrajectoryBuffer {
    pub fn new(format: TrajectoryFormat) -> Self {
        TrajectoryBuffer {
            format,
            snapshots: Vec::new(),
        }
    }

    pub fn push(&mut self, s: &OpinionState) {
        self.snapshots.push((s.time(), s.opinions().to_vec()));
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    fn render(&self, out: &mut String) {
        let n = self.snapshots.first().map_or(0, |s| s.1.len());
        match self.format {
            TrajectoryFormat::Long => {
                out.push_str("t,node,opinion\n");
                for (t, x) in &self.snapshots {
                    for (i, v) in x.iter().enumerate() {
                        let _ = writeln!(out, "{t},{i},{v}");
                    }
                }
            }
            TrajectoryFormat::Wide => {
                out.push('t');
                for i in 0..n {
                    let _ = write!(out, ",x{i}");
                }
                out.push('\n');
                for (t, x) in &self.snapshots {
                    let _ = write!(out, "{t}");
                    for v in x {
                        let _ = write!(out, ",{v}");
                    }
                    out.push('\n');
                }
            }
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    seed: u64,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    report: &'a T,
}

pub(crate) struct Writer<'a> {
    cfg: &'a ExperimentConfig,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub(crate) fn new(cfg: &'a ExperimentConfig) -> Self {
        Writer { cfg, files: Vec::new() }
    }

    fn header(&self) -> String {
        format!("# seed={}\n# config={}\n", self.cfg.seed, self.cfg.to_json())
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.cfg.out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, columns: &str, rows: impl FnOnce(&mut String)) -> Result<()> {
        let mut s = self.header();
        s.push_str(columns);
        s.push('\n');
        rows(&mut s);
        self.write(name, &s)
    }

    fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        let env = Envelope {
            seed: self.cfg.seed,
            config: self.cfg,
            report,
        };
        let mut s = serde_json::to_string_pretty(&env)?;
        s.push('\n');
        self.write(name, &s)
    }

    fn finish(self, cutoff: bool) -> Result<Outcome> {
        Ok(Outcome {
            files: self.files,
            cutoff,
        })
    }

    pub(crate) fn generate(mut self, report: &GenerateReport, h: &Hypergraph) -> Result<Outcome> {
        if h.is_explicit() {
            let mut buf = self.header().into_bytes();
            write_hypergraph(h, &mut buf).map_err(|e| Error::io(self.cfg.out_dir.join("hypergraph.txt"), e))?;
            self.write("hypergraph.txt", std::str::from_utf8(&buf).expect("ascii"))?;
        }
        self.json("generate.json", report)?;
        self.finish(false)
    }

    pub(crate) fn single_run(mut self, report: &RunReport, traj: &TrajectoryBuffer) -> Result<Outcome> {
        let mut s = self.header();
        traj.render(&mut s);
        self.write("trajectory.csv", &s)?;
        self.json("summary.json", report)?;
        self.finish(report.stop_reason == StopReason::Cutoff)
    }

    pub(crate) fn census(mut self, report: &CensusReport) -> Result<Outcome> {
        self.csv(
            "census.csv",
            "trial,t_star,stop_reason,cluster_count,largest_cluster_value,largest_cluster_size,initial_mean,mean_drift",
            |s| {
                for r in &report.rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        r.trial,
                        r.t_star,
                        r.stop_reason,
                        r.cluster_count,
                        r.largest_cluster_value,
                        r.largest_cluster_size,
                        r.initial_mean,
                        r.mean_drift
                    );
                }
            },
        )?;
        self.json("census.json", report)?;
        self.finish(report.cutoff_count > 0)
    }

    pub(crate) fn sweep(mut self, report: &SweepReport) -> Result<Outcome> {
        self.csv("sweep.csv", "sigma,trial,t_star,stop_reason", |s| {
            for r in &report.rows {
                let _ = writeln!(s, "{},{},{},{}", r.sigma, r.trial, r.t_star, r.stop_reason);
            }
        })?;
        self.json("sweep.json", report)?;
        self.finish(false)
    }

    pub(crate) fn estar(mut self, report: &EstarReport) -> Result<Outcome> {
        self.csv("a_hat.csv", "n,a_hat,std_err,trials", |s| {
            for e in &report.table {
                let _ = writeln!(s, "{},{},{},{}", e.n, e.a_hat, e.std_err, e.trials);
            }
        })?;
        self.csv("estar.csv", "N,expected_size", |s| {
            for (n, e) in &report.curve {
                let _ = writeln!(s, "{n},{e}");
            }
        })?;
        self.json("estar.json", report)?;
        self.finish(false)
    }

    pub(crate) fn jumps(mut self, report: &JumpsReport) -> Result<Outcome> {
        self.csv("jumps.csv", "sigma,hypergraph_id,mean_edge_size,mean_J0,x,edge_count,explicit", |s| {
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.sigma, r.hypergraph_id, r.mean_edge_size, r.mean_j0, r.x, r.edge_count, r.explicit
                );
            }
        })?;
        self.json("jumps.json", report)?;
        self.finish(false)
    }

    pub(crate) fn polarization(mut self, report: &PolarizationReport) -> Result<Outcome> {
        self.csv("polarization.csv", "trial,t_star,stop_reason,cluster_count,absorbing", |s| {
            for t in &report.trials {
                let absorbing = t.absorbing.map_or("unknown".to_string(), |b| b.to_string());
                let _ = writeln!(s, "{},{},{},{},{}", t.trial, t.t_star, t.stop_reason, t.clusters.len(), absorbing);
            }
        })?;
        self.json("polarization.json", report)?;
        self.finish(report.cutoff_count > 0)
    }
}
