//! One run on the complete hypergraph with normally distributed opinions.
//!
//!     cargo run --release --example simulate -- 300 1.2

use hyperbcm::{run, Hypergraph, InitialDistribution, SimConfig, StopRule};

fn main() -> hyperbcm::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(300, |s| s.parse().expect("node count"));
    let sigma: f64 = args.next().map_or(1.2, |s| s.parse().expect("sigma"));

    let h = Hypergraph::complete(n)?;
    let stop = StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps: 5_000_000 }]);
    let cfg = SimConfig::new(1.0, InitialDistribution::Normal { mu: 0.0, sigma }, 42, stop);
    let s = run(&h, &cfg)?;

    println!("N = {n}, sigma = {sigma}: {} after {} steps ({} updates)", s.stop_reason, s.t_star, s.updates);
    println!("opinion jumps: {}", s.jump_total);
    for c in s.clusters.clusters() {
        println!("  cluster at {:+.6} with {} nodes", c.value, c.size);
    }
    println!("initial mean {:+.6}, drift {:.1e}", s.initial_mean, s.mean_drift);
    Ok(())
}
