//! Concordance of freshly drawn hyperedges: Monte Carlo against the Chernoff
//! bound, and the expected size of the first concordant hyperedge.

use hyperbcm::analysis::{
    chernoff_concordance_bound, concordance_prob_mc, concordance_table, consensus_node_threshold, estar_curve,
    limiting_concordance, max_cluster_bound, BoundParams,
};
use hyperbcm::stats::{linear_fit, trial_rng};
use hyperbcm::InitialDistribution;

fn main() -> hyperbcm::Result<()> {
    let c = 1.0;
    for sigma in [0.8f64, 1.0, 1.2] {
        let dist = InitialDistribution::Normal { mu: 0.0, sigma };
        println!("sigma = {sigma} (limit a = {})", limiting_concordance(sigma * sigma, c));
        let bound = BoundParams::new(c, sigma * sigma).ok().filter(|b| b.lambda() != 1.0);
        for n in [5, 20, 80] {
            let est = concordance_prob_mc(n, &dist, c, 20_000, &mut trial_rng(1, n as u64))?;
            let b = bound.map(|b| chernoff_concordance_bound(&b, n)).transpose()?;
            println!("  n = {n:>3}: a_hat = {:.4} +- {:.4}, r^(n-1) = {b:.4?}", est.a_hat, est.std_err);
        }
    }

    let dist = InitialDistribution::Normal { mu: 0.0, sigma: 1.2 };
    let sizes: Vec<usize> = (2..=200).collect();
    let table = concordance_table(&sizes, &dist, c, 4000, 5)?;
    let a_hat: Vec<f64> = table.iter().map(|e| e.a_hat).collect();
    let curve = estar_curve(&a_hat, 200);
    let xs: Vec<f64> = curve.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = curve.iter().map(|p| p.1).collect();
    if let Some(fit) = linear_fit(&xs, &ys) {
        println!("E[|e*|] ~ {:.3} N + {:.3} (R^2 {:.4})", fit.slope, fit.intercept, fit.r_squared);
    }

    println!("consensus guaranteed on U(0,1), c = 0.5 from N = {}", consensus_node_threshold(0.0, 1.0, 0.5));
    println!("at most {} clusters on U(-2,2), c = 0.01", max_cluster_bound(-2.0, 2.0, 0.01));
    Ok(())
}
