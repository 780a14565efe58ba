//! Named configurations for the standard experiments.
//!
//! Desk-scale by default; `paper_scale` restores the original sizes, which can
//! take hours on a workstation.

use std::path::PathBuf;

use crate::dynamics::{InitialDistribution, StopRule};
use crate::error::{Error, Result};
use crate::generators::{HsbmMode, HsbmParams};

use super::{
    EstarParams, ExperimentConfig, ExperimentKind, HypergraphSpec, JumpParams, ModelParams, PolarizationParams,
    SweepParams, TrajectoryFormat,
};

pub const NAMES: &[&str] = &[
    "normal-complete",
    "gnm-sparse",
    "enron",
    "census",
    "sweep",
    "estar",
    "jumps",
    "echo-chambers",
    "echo-chambers-mixed",
    "echo-chambers-disconnected",
    "gnm-small",
    "hsbm-small",
];

/// Preset used when a subcommand gets neither `--config` nor `--preset`.
pub fn default_for(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::SingleRun => "normal-complete",
        ExperimentKind::FileRun => "enron",
        ExperimentKind::ConsensusCensus => "census",
        ExperimentKind::SigmaSweep => "sweep",
        ExperimentKind::EstarCurve => "estar",
        ExperimentKind::JumpSlope => "jumps",
        ExperimentKind::Polarization => "echo-chambers",
        ExperimentKind::Generate => "hsbm-small",
    }
}

fn absorbing_or(steps: u64) -> StopRule {
    StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps }])
}

fn normal(sigma: f64) -> InitialDistribution {
    InitialDistribution::Normal { mu: 0.0, sigma }
}

fn uniform(a: f64, b: f64) -> InitialDistribution {
    InitialDistribution::Uniform { a, b }
}

fn base(kind: ExperimentKind, model: ModelParams, hypergraph: Option<HypergraphSpec>) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        seed: 1,
        model,
        hypergraph,
        trials: 1,
        threads: None,
        out_dir: PathBuf::from("out"),
        trajectory: TrajectoryFormat::Long,
        sweep: None,
        estar: None,
        jumps: None,
        polarization: None,
    }
}

fn two_communities(size: usize, q: f64, a: InitialDistribution, b: InitialDistribution) -> ExperimentConfig {
    let mut cfg = base(
        ExperimentKind::Polarization,
        ModelParams::new(1.0, a, absorbing_or(10_000_000)),
        Some(HypergraphSpec::Hsbm {
            params: HsbmParams {
                community_sizes: vec![size, size],
                p: 1.0,
                q,
                max_mixed_size: Some(2),
            },
            mode: HsbmMode::Implicit,
        }),
    );
    cfg.polarization = Some(PolarizationParams {
        community_init: vec![a, b],
    });
    cfg
}

pub fn get(name: &str, paper_scale: bool) -> Result<ExperimentConfig> {
    let cfg = match name {
        "normal-complete" => {
            let mut model = ModelParams::new(1.0, normal(1.2), absorbing_or(10_000_000));
            model.condition_first_pick_concordant = true;
            base(ExperimentKind::SingleRun, model, Some(HypergraphSpec::Complete { nodes: 500 }))
        }
        "gnm-sparse" => {
            let mut model = ModelParams::new(1.0, uniform(-2.0, 2.0), absorbing_or(100_000_000));
            model.snapshot_every = Some(10_000);
            base(
                ExperimentKind::SingleRun,
                model,
                Some(HypergraphSpec::GnmCapped {
                    nodes: 1000,
                    per_size: 100,
                    min_size: None,
                    max_size: None,
                }),
            )
        }
        "enron" => {
            let mut model = ModelParams::new(1.0, uniform(0.0, 1.0), absorbing_or(100_000_000));
            model.snapshot_every = Some(1000);
            base(
                ExperimentKind::FileRun,
                model,
                Some(HypergraphSpec::File {
                    path: PathBuf::from("email-Enron.txt"),
                }),
            )
        }
        "census" => {
            let mut cfg = base(
                ExperimentKind::ConsensusCensus,
                ModelParams::new(1.0, normal(1.2), absorbing_or(10_000_000)),
                Some(HypergraphSpec::Complete { nodes: 200 }),
            );
            cfg.trials = if paper_scale { 1000 } else { 100 };
            cfg
        }
        "sweep" => {
            let mut cfg = base(
                ExperimentKind::SigmaSweep,
                ModelParams::new(1.0, normal(1.0), StopRule::MaxSteps { steps: 10_000 }),
                Some(HypergraphSpec::Complete {
                    nodes: if paper_scale { 50_000 } else { 2000 },
                }),
            );
            cfg.trials = 20;
            cfg.sweep = Some(SweepParams {
                sigma_min: 0.9,
                sigma_max: 1.1,
                sigma_step: 0.004,
                epsilon: 1e-5,
                cutoff: 10_000,
            });
            cfg
        }
        "estar" => {
            let mut cfg = base(
                ExperimentKind::EstarCurve,
                ModelParams::new(1.0, normal(1.2), StopRule::MaxSteps { steps: 0 }),
                None,
            );
            cfg.estar = Some(EstarParams {
                max_nodes: 500,
                trials_per_size: 10_000,
            });
            cfg
        }
        "jumps" => {
            let mut cfg = base(
                ExperimentKind::JumpSlope,
                ModelParams::new(1.0, normal(1.0), StopRule::MaxSteps { steps: 1 }),
                None,
            );
            cfg.jumps = Some(JumpParams {
                nodes: if paper_scale { 1000 } else { 300 },
                hypergraphs: 200,
                trials: if paper_scale { 500 } else { 200 },
                sigmas: vec![0.6, 0.8, 1.0, 1.2],
                explicit_edge_cap: 200_000,
            });
            cfg
        }
        "echo-chambers" => two_communities(500, 1.0, uniform(1.8, 2.2), uniform(-2.2, -1.8)),
        // Communities of 10 keep mixed pairs a visible share of the hyperedges.
        "echo-chambers-mixed" => two_communities(10, 1.0, uniform(-0.1, 0.1), uniform(-0.1, 0.1)),
        "echo-chambers-disconnected" => two_communities(500, 0.0, uniform(1.8, 2.2), uniform(-2.2, -1.8)),
        "gnm-small" => base(
            ExperimentKind::Generate,
            ModelParams::new(1.0, uniform(0.0, 1.0), StopRule::MaxSteps { steps: 0 }),
            Some(HypergraphSpec::GnmCapped {
                nodes: 50,
                per_size: 20,
                min_size: Some(2),
                max_size: Some(8),
            }),
        ),
        "hsbm-small" => base(
            ExperimentKind::Generate,
            ModelParams::new(1.0, uniform(0.0, 1.0), StopRule::MaxSteps { steps: 0 }),
            Some(HypergraphSpec::Hsbm {
                params: HsbmParams {
                    community_sizes: vec![6, 6],
                    p: 0.5,
                    q: 0.1,
                    max_mixed_size: Some(3),
                },
                mode: HsbmMode::default(),
            }),
        ),
        other => {
            return Err(Error::invalid(format!(
                "unknown preset {other:?}; known presets: {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates_and_round_trips() {
        for name in NAMES {
            for full in [false, true] {
                let cfg = get(name, full).unwrap();
                cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
                let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
                assert_eq!(back, cfg, "{name}");
            }
        }
        assert!(get("nope", false).is_err());
    }

    #[test]
    fn sweep_grid_has_51_points() {
        let g = get("sweep", false).unwrap().sweep.unwrap().grid().unwrap();
        assert_eq!(g.len(), 51);
        assert!((g[50] - 1.1).abs() < 1e-12);
    }
}
