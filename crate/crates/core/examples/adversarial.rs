//! Prime decomposition of a mean update, and a starting state that converges
//! but never reaches its limit.

use hyperbcm::analysis::{adversarial_initial_state, prime_decompose};
use hyperbcm::stats::trial_rng;
use hyperbcm::{Hyperedge, Hypergraph, InitialDistribution, SimConfig, Simulation, StopRule};

fn main() -> hyperbcm::Result<()> {
    let e: Vec<u32> = (0..12).collect();
    println!("averaging over 12 nodes as prime-size steps:");
    for part in prime_decompose(&e)? {
        println!("  {part:?}");
    }

    // Triangle {0,1,2}; node 3 hangs off node 2.
    let edges = [[0u32, 1], [1, 2], [0, 2], [2, 3]]
        .iter()
        .map(|e| Hyperedge::new(e.iter().copied()))
        .collect::<hyperbcm::Result<Vec<_>>>()?;
    let h = Hypergraph::explicit(4, edges)?;
    let x0 = adversarial_initial_state(&h, &[0, 1, 2], 1.0)?;
    println!("start: {:?}", x0.opinions());

    let cfg = SimConfig::new(1.0, InitialDistribution::Uniform { a: 0.0, b: 1.0 }, 0, StopRule::MaxSteps { steps: 0 });
    let mut sim = Simulation::with_state(&h, &cfg, x0, trial_rng(0, 0))?;
    for checkpoint in [10, 100, 1000] {
        while sim.state().time() < checkpoint {
            sim.step_in_place()?;
        }
        let x = sim.state().opinions();
        let gap = x[..3].iter().map(|v| (v - 1.0 / 3.0).abs()).fold(0.0, f64::max);
        println!("t = {checkpoint:>4}: {:?}, max distance to 1/3 = {gap:.3e}", &x[..3]);
    }
    Ok(())
}
