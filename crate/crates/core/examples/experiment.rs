//! Experiments driven by a JSON config, as the CLI does it.

use hyperbcm::experiments::{self, presets, ExperimentConfig};

fn main() -> hyperbcm::Result<()> {
    let mut cfg = presets::get("census", false)?;
    cfg.trials = 10;
    cfg.out_dir = std::env::temp_dir().join("hyperbcm-census");
    let json = cfg.to_json();
    println!("{json}");

    let cfg = ExperimentConfig::from_json(&json)?;
    let report = experiments::census(&cfg)?;
    println!(
        "{}/{} trials reached consensus, max |gamma - mean| = {:.1e}",
        report.consensus_count, report.trials, report.max_consensus_deviation
    );
    let outcome = experiments::execute(&cfg)?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
