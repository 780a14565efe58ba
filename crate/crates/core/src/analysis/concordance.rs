//! Concordance probabilities of freshly drawn hyperedges: limits, Chernoff
//! bounds, Monte Carlo estimates and the expected size of the first concordant
//! hyperedge.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::InitialDistribution;
use crate::error::{Error, Result};
use crate::stats::{ln_binomial, log_sum_exp, trial_rng, Welford};

/// Limit of `P[d(e, x) < c | |e| = n]` as `n` grows, for iid opinions with variance `sigma2`.
pub fn limiting_concordance(sigma2: f64, c: f64) -> f64 {
    assert!(sigma2 > 0.0 && c >= 0.0, "need sigma2 > 0 and c >= 0");
    if c > sigma2 {
        1.0
    } else if c == sigma2 {
        0.5
    } else {
        0.0
    }
}

/// `lambda = c / sigma^2` for normally distributed opinions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    lambda: f64,
}

impl BoundParams {
    pub fn new(c: f64, sigma2: f64) -> Result<Self> {
        Self::from_lambda(c / sigma2)
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(BoundParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `r = exp((1 - lambda)/2) * sqrt(lambda)`, below 1 unless `lambda = 1`.
    pub fn r(&self) -> f64 {
        ((1.0 - self.lambda) / 2.0).exp() * self.lambda.sqrt()
    }

    /// Interval `(lo, hi)` that must contain `P[d < c]` for a size-`n` hyperedge.
    pub fn concordance_interval(&self, n: usize) -> Result<(f64, f64)> {
        let b = chernoff_concordance_bound(self, n)?;
        Ok(if self.lambda < 1.0 { (0.0, b) } else { (1.0 - b, 1.0) })
    }
}

/// `r^(n-1)`: an upper bound on `P[d < c]` when `lambda < 1` and on `P[d >= c]`
/// when `lambda > 1`.
pub fn chernoff_concordance_bound(params: &BoundParams, n: usize) -> Result<f64> {
    if params.lambda == 1.0 {
        return Err(Error::BoundUndefined);
    }
    if n < 2 {
        return Err(Error::invalid(format!("hyperedge size must be at least 2, got {n}")));
    }
    Ok(params.r().powi((n - 1) as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcordanceEstimate {
    pub n: usize,
    pub a_hat: f64,
    pub trials: u64,
    pub std_err: f64,
}

impl ConcordanceEstimate {
    pub fn from_counts(n: usize, hits: u64, trials: u64) -> Self {
        let a_hat = hits as f64 / trials as f64;
        ConcordanceEstimate {
            n,
            a_hat,
            trials,
            std_err: (a_hat * (1.0 - a_hat) / trials as f64).sqrt(),
        }
    }
}

/// Fraction of `trials` in which `n` fresh draws from `dist` have sample variance below `c`.
pub fn concordance_prob_mc<R: Rng + ?Sized>(
    n: usize,
    dist: &InitialDistribution,
    c: f64,
    trials: u64,
    rng: &mut R,
) -> Result<ConcordanceEstimate> {
    if n < 2 {
        return Err(Error::invalid(format!("hyperedge size must be at least 2, got {n}")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    dist.validate()?;
    let mut buf = vec![0.0; n];
    let mut hits = 0u64;
    for _ in 0..trials {
        dist.fill(rng, &mut buf);
        let w: Welford = buf.iter().copied().collect();
        if w.sample_variance() < c {
            hits += 1;
        }
    }
    Ok(ConcordanceEstimate::from_counts(n, hits, trials))
}

/// Estimates for every size in `sizes`, in parallel on the current rayon pool.
/// Size `n` uses stream `n` of `seed`, so results do not depend on the thread count.
pub fn concordance_table(
    sizes: &[usize],
    dist: &InitialDistribution,
    c: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<ConcordanceEstimate>> {
    sizes
        .par_iter()
        .map(|&n| concordance_prob_mc(n, dist, c, trials, &mut trial_rng(seed, n as u64)))
        .collect()
}

/// `sum n a_n C(N,n) / sum a_n C(N,n)` over `n = 2..=N`, evaluated in log space.
/// `a_hat[k]` holds the estimate for size `k + 2`.
pub fn expected_first_concordant_size(node_count: usize, a_hat: &[f64]) -> Result<f64> {
    if node_count < 2 {
        return Err(Error::TooFewNodes(node_count));
    }
    if a_hat.len() < node_count - 1 {
        return Err(Error::invalid(format!(
            "need concordance estimates for sizes 2..={node_count}, got {}",
            a_hat.len()
        )));
    }
    let mut den = Vec::with_capacity(node_count);
    let mut num = Vec::with_capacity(node_count);
    for n in 2..=node_count {
        let a = a_hat[n - 2];
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::invalid(format!("concordance estimate {a} outside [0, 1]")));
        }
        if a > 0.0 {
            let w = a.ln() + ln_binomial(node_count as u64, n as u64);
            den.push(w);
            num.push(w + (n as f64).ln());
        }
    }
    if den.is_empty() {
        return Err(Error::NoConcordantSizes);
    }
    Ok((log_sum_exp(&num) - log_sum_exp(&den)).exp())
}

/// `(N, E[|e*|])` for `N = 2..=max_nodes`, skipping `N` with no concordant size.
pub fn estar_curve(a_hat: &[f64], max_nodes: usize) -> Vec<(usize, f64)> {
    (2..=max_nodes)
        .filter_map(|n| expected_first_concordant_size(n, &a_hat[..n - 1]).ok().map(|e| (n, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn normal(sigma: f64) -> InitialDistribution {
        InitialDistribution::Normal { mu: 0.0, sigma }
    }

    #[test]
    fn limits() {
        assert_eq!(limiting_concordance(1.0, 2.0), 1.0);
        assert_eq!(limiting_concordance(1.0, 1.0), 0.5);
        assert_eq!(limiting_concordance(1.44, 1.0), 0.0);
    }

    #[test]
    fn bound_value_and_lambda_one() {
        let p = BoundParams::new(1.0, 1.44).unwrap();
        assert!((p.lambda() - 25.0 / 36.0).abs() < 1e-15);
        let r = ((1.0 - 25.0 / 36.0) / 2.0f64).exp() * (25.0f64 / 36.0).sqrt();
        assert!((chernoff_concordance_bound(&p, 11).unwrap() - r.powi(10)).abs() < 1e-15);
        assert!(r < 1.0);
        let one = BoundParams::from_lambda(1.0).unwrap();
        assert!(matches!(chernoff_concordance_bound(&one, 5), Err(Error::BoundUndefined)));
        assert!(chernoff_concordance_bound(&p, 1).is_err());
    }

    #[test]
    fn bound_dominates_exact_chi_square_probability() {
        // (n-1) s^2 / sigma^2 ~ chi^2_{n-1}, so P[s^2 < c] = F_{n-1}((n-1) lambda).
        for &lambda in &[0.3, 0.5, 25.0 / 36.0, 0.9, 1.2, 2.0, 4.0] {
            let p = BoundParams::from_lambda(lambda).unwrap();
            for n in [2usize, 3, 5, 10, 20, 50, 200] {
                let k = (n - 1) as f64;
                let exact = ChiSquared::new(k).unwrap().cdf(k * lambda);
                let (lo, hi) = p.concordance_interval(n).unwrap();
                assert!(lo - 1e-12 <= exact && exact <= hi + 1e-12, "lambda={lambda} n={n}");
            }
        }
    }

    #[test]
    fn mc_matches_chi_square_tail() {
        let mut rng = trial_rng(5, 0);
        // n = 2: s^2 = (x1-x2)^2/2 ~ sigma^2 chi^2_1.
        let sigma = 1.0;
        let c = 2.0;
        let est = concordance_prob_mc(2, &normal(sigma), c, 100_000, &mut rng).unwrap();
        let exact = ChiSquared::new(1.0).unwrap().cdf(c / (sigma * sigma));
        assert!((est.a_hat - exact).abs() < 4.0 * est.std_err, "{} vs {exact}", est.a_hat);
        let near_one = concordance_prob_mc(2, &normal(0.1), 100.0, 1000, &mut rng).unwrap();
        assert_eq!(near_one.a_hat, 1.0);
    }

    #[test]
    fn mc_zero_bound_never_concordant() {
        let mut rng = trial_rng(1, 0);
        let est = concordance_prob_mc(5, &normal(1.0), 0.0, 1000, &mut rng).unwrap();
        assert_eq!(est.a_hat, 0.0);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn mc_uniform_at_variance_is_half() {
        let mut rng = trial_rng(2, 0);
        let u = InitialDistribution::Uniform { a: 0.0, b: 1.0 };
        let est = concordance_prob_mc(2000, &u, 1.0 / 12.0, 4000, &mut rng).unwrap();
        assert!((est.a_hat - 0.5).abs() < 3.0 * 0.5 / 4000f64.sqrt(), "{}", est.a_hat);
    }

    #[test]
    fn table_is_thread_independent() {
        let sizes: Vec<usize> = (2..30).collect();
        let a = concordance_table(&sizes, &normal(1.2), 1.0, 500, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| concordance_table(&sizes, &normal(1.2), 1.0, 500, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn estar_single_term() {
        assert_eq!(expected_first_concordant_size(2, &[0.3]).unwrap(), 2.0);
        assert!(matches!(
            expected_first_concordant_size(4, &[0.0, 0.0, 0.0]),
            Err(Error::NoConcordantSizes)
        ));
    }

    #[test]
    fn estar_geometric_closed_form() {
        // With a_n = a r^n the binomial theorem gives both sums in closed form.
        for &(n, r) in &[(2usize, 0.3f64), (3, 0.5), (10, 0.9), (50, 0.7), (300, 0.5)] {
            let a = 0.37;
            let a_hat: Vec<f64> = (2..=n).map(|k| a * r.powi(k as i32)).collect();
            let nf = n as f64;
            let expect = (nf * (1.0 + r).powf(nf - 1.0) - nf)
                / ((1.0 / r) * (1.0 + r).powf(nf) - nf - 1.0 / r);
            let got = expected_first_concordant_size(n, &a_hat).unwrap();
            assert!(((got - expect) / expect).abs() < 1e-9, "N={n}: {got} vs {expect}");
        }
    }

    #[test]
    fn estar_survives_large_binomials() {
        let a_hat = vec![0.5; 499];
        let e = expected_first_concordant_size(500, &a_hat).unwrap();
        assert!((e - 250.0).abs() < 1.0, "{e}");
        let curve = estar_curve(&a_hat, 10);
        assert_eq!(curve.len(), 9);
    }
}
