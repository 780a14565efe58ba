//! Two cliques joined by every mixed pair. Far-apart communities settle into
//! separate opinions; close ones merge. With large cliques the mixed pairs are
//! almost never drawn, so the communities here are small.

use hyperbcm::generators::{gen_hsbm, HsbmMode, HsbmParams};
use hyperbcm::stats::trial_rng;
use hyperbcm::{InitialDistribution, OpinionState, SimConfig, Simulation, StopRule};
use rand::distributions::{Distribution, Uniform};

fn main() -> hyperbcm::Result<()> {
    let params = HsbmParams {
        community_sizes: vec![8, 8],
        p: 1.0,
        q: 1.0,
        max_mixed_size: Some(2),
    };
    let h = gen_hsbm(&params, &mut trial_rng(0, 0), HsbmMode::Implicit)?;
    let stop = StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps: 2_000_000 }]);
    let cfg = SimConfig::new(1.0, InitialDistribution::Uniform { a: 0.0, b: 1.0 }, 0, stop);

    for center in [2.0, 0.3] {
        let mut rng = trial_rng(1, 0);
        let (left, right) = (Uniform::new(-center - 0.2, -center + 0.2), Uniform::new(center - 0.2, center + 0.2));
        let x: Vec<f64> = (0..16).map(|i| if i < 8 { left.sample(&mut rng) } else { right.sample(&mut rng) }).collect();
        let s = Simulation::with_state(&h, &cfg, OpinionState::new(x)?, rng)?.run()?;
        print!("communities near -{center} and +{center}: {} at t = {}, clusters", s.stop_reason, s.t_star);
        for c in s.clusters.clusters() {
            print!(" {:+.4} x{}", c.value, c.size);
        }
        println!();
    }
    Ok(())
}
