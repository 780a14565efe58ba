//! Opinion jumps in the first step: the closed form fed by Monte Carlo
//! estimates, against direct simulation on a hypergraph with one edge size.

use hyperbcm::analysis::{expected_jumps, jump_probability_mc, single_jump_probability, concordance_prob_mc, JumpModelInputs};
use hyperbcm::generators::{gen_gnm, GnmParams};
use hyperbcm::stats::trial_rng;
use hyperbcm::{InitialDistribution, SimConfig, Simulation, StopRule};

fn main() -> hyperbcm::Result<()> {
    let (c, sigma, n) = (1.0, 0.8, 12usize);
    let dist = InitialDistribution::Normal { mu: 0.0, sigma };
    let mut rng = trial_rng(3, 0);
    let a_n = concordance_prob_mc(n, &dist, c, 50_000, &mut rng)?.a_hat;
    let p_n = jump_probability_mc(n, &dist, c, 50_000, &mut rng)?.p_hat;
    let inputs = JumpModelInputs {
        sizes: vec![n],
        g: vec![1.0],
        a_n: vec![a_n],
        p_n: vec![p_n],
        a: 1.0,
        p: single_jump_probability(&dist, c),
    };
    println!("size {n}: a_n = {a_n:.4}, p_n = {p_n:.4}, p = {:.4}", inputs.p);
    println!("predicted E[J0] = {:.4}", expected_jumps(&inputs)?);

    let h = gen_gnm(&GnmParams::new(200, [(n, 500)]), &mut rng)?;
    let trials = 20_000u64;
    let mut total = 0usize;
    for t in 0..trials {
        let cfg = SimConfig::new(c, dist, t, StopRule::MaxSteps { steps: 1 });
        let mut sim = Simulation::from_rng(&h, &cfg, trial_rng(4, t))?;
        total += sim.step()?.jumps;
    }
    println!("simulated E[J0] = {:.4} over {trials} one-step runs", total as f64 / trials as f64);
    Ok(())
}
