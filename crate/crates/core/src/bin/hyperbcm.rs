use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperbcm::experiments::{self, presets, ExperimentConfig, ExperimentKind, HypergraphSpec, TrajectoryFormat};

/// Bounded-confidence opinion dynamics on hypergraphs.
///
/// Exit status: 0 on success, 1 on error, 2 when a run hit its step cap.
#[derive(Parser, Debug)]
#[command(name = "hyperbcm", version)]
struct Cli {
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON experiment config; its kind must match the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (defaults to all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use full-size presets. Slow.
    #[arg(long, global = true)]
    paper_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Named preset to start from.
    #[arg(long)]
    preset: Option<String>,
    /// Number of trials (overrides the config).
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Layout {
    Long,
    Wide,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a hypergraph and write it (when explicit) with a summary.
    Generate(Common),
    /// One simulation with trajectory CSV and summary JSON.
    Run {
        #[command(flatten)]
        common: Common,
        /// Run on a hypergraph file instead of the preset's hypergraph.
        #[arg(long)]
        hypergraph: Option<PathBuf>,
        #[arg(long, value_enum)]
        trajectory: Option<Layout>,
    },
    /// Many trials, counting consensus outcomes.
    Census(Common),
    /// Convergence time across a grid of initial standard deviations.
    SweepSigma(Common),
    /// Expected size of the first concordant hyperedge against N.
    Estar(Common),
    /// Opinion jumps in one step against mean hyperedge size.
    Jumps(Common),
    /// Two-community runs with per-community cluster reports.
    Polarization(Common),
    /// List preset names.
    Presets,
}

fn kinds(cmd: &Command) -> &'static [ExperimentKind] {
    match cmd {
        Command::Generate(_) => &[ExperimentKind::Generate],
        Command::Run { .. } => &[ExperimentKind::SingleRun, ExperimentKind::FileRun],
        Command::Census(_) => &[ExperimentKind::ConsensusCensus],
        Command::SweepSigma(_) => &[ExperimentKind::SigmaSweep],
        Command::Estar(_) => &[ExperimentKind::EstarCurve],
        Command::Jumps(_) => &[ExperimentKind::JumpSlope],
        Command::Polarization(_) => &[ExperimentKind::Polarization],
        Command::Presets => &[],
    }
}

fn build_config(cli: &Cli) -> hyperbcm::Result<ExperimentConfig> {
    let allowed = kinds(&cli.command);
    let common = match &cli.command {
        Command::Generate(c)
        | Command::Census(c)
        | Command::SweepSigma(c)
        | Command::Estar(c)
        | Command::Jumps(c)
        | Command::Polarization(c) => c.clone(),
        Command::Run { common, .. } => common.clone(),
        Command::Presets => unreachable!(),
    };
    let mut cfg = match (&cli.config, &common.preset) {
        (Some(_), Some(_)) => return Err(hyperbcm::Error::InvalidParameter("give either --config or --preset, not both".into())),
        (Some(path), None) => {
            if cli.paper_scale {
                log::warn!("--paper-scale only affects presets; using {} as given", path.display());
            }
            ExperimentConfig::load(path)?
        }
        (None, preset) => {
            let name = preset.as_deref().unwrap_or(presets::default_for(allowed[0]));
            if cli.paper_scale {
                log::warn!("full-size preset {name}: expect a long runtime");
            }
            presets::get(name, cli.paper_scale)?
        }
    };

    if let Command::Run { hypergraph, trajectory, .. } = &cli.command {
        if let Some(path) = hypergraph {
            cfg.kind = ExperimentKind::FileRun;
            cfg.hypergraph = Some(HypergraphSpec::File { path: path.clone() });
        }
        if let Some(t) = trajectory {
            cfg.trajectory = match t {
                Layout::Long => TrajectoryFormat::Long,
                Layout::Wide => TrajectoryFormat::Wide,
            };
        }
    }
    if !allowed.contains(&cfg.kind) {
        return Err(hyperbcm::Error::InvalidParameter(format!(
            "config kind {:?} does not match this subcommand",
            cfg.kind
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Command::Presets = cli.command {
        for name in presets::NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let result = build_config(&cli).and_then(|cfg| experiments::execute(&cfg));
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.cutoff {
                eprintln!("warning: step cap reached before convergence");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
