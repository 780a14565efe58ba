//! Expected opinion jumps at a single step.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dynamics::InitialDistribution;
use crate::error::{Error, Result};
use crate::stats::{KahanSum, Welford};

/// Per-size inputs to the jump expectation. Entry `k` of each vector refers to
/// hyperedge size `sizes[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpModelInputs {
    pub sizes: Vec<usize>,
    /// Probability that the selected hyperedge has size `sizes[k]`.
    pub g: Vec<f64>,
    pub a_n: Vec<f64>,
    pub p_n: Vec<f64>,
    /// Limiting concordance probability.
    pub a: f64,
    /// `P[|x - mu| > c]` for a single opinion.
    pub p: f64,
}

impl JumpModelInputs {
    pub fn validate(&self) -> Result<()> {
        let k = self.sizes.len();
        if self.g.len() != k || self.a_n.len() != k || self.p_n.len() != k {
            return Err(Error::invalid("jump model vectors must have equal lengths"));
        }
        let in_unit = |x: &f64| (0.0..=1.0).contains(x);
        if !self.g.iter().chain(&self.a_n).chain(&self.p_n).all(in_unit) || !in_unit(&self.a) || !in_unit(&self.p) {
            return Err(Error::invalid("jump model probabilities must lie in [0, 1]"));
        }
        let total: KahanSum = self.g.iter().copied().collect();
        if (total.total() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("size distribution sums to {}", total.total())));
        }
        Ok(())
    }

    /// `E[|e|]` under `g`.
    pub fn mean_size(&self) -> f64 {
        self.sizes
            .iter()
            .zip(&self.g)
            .map(|(&n, &g)| n as f64 * g)
            .collect::<KahanSum>()
            .total()
    }
}

/// `E[J] = sum_n a_n g(n) p_n n`.
pub fn expected_jumps(inputs: &JumpModelInputs) -> Result<f64> {
    inputs.validate()?;
    let mut s = KahanSum::new();
    for k in 0..inputs.sizes.len() {
        s.add(inputs.a_n[k] * inputs.g[k] * inputs.p_n[k] * inputs.sizes[k] as f64);
    }
    Ok(s.total())
}

/// The same expectation split around the limits `a` and `p`:
/// `p a E|e| + a sum (p_n - p) n g + p sum (a_n - a) n g + sum (a_n - a)(p_n - p) n g`.
pub fn expected_jumps_expanded(inputs: &JumpModelInputs) -> Result<[f64; 4]> {
    inputs.validate()?;
    let (a, p) = (inputs.a, inputs.p);
    let mut terms = [KahanSum::new(); 4];
    for k in 0..inputs.sizes.len() {
        let ng = inputs.sizes[k] as f64 * inputs.g[k];
        let da = inputs.a_n[k] - a;
        let dp = inputs.p_n[k] - p;
        terms[0].add(p * a * ng);
        terms[1].add(a * dp * ng);
        terms[2].add(p * da * ng);
        terms[3].add(da * dp * ng);
    }
    Ok(terms.map(|t| t.total()))
}

/// `P[|x - mu| > c]` for one opinion drawn from `dist`.
pub fn single_jump_probability(dist: &InitialDistribution, c: f64) -> f64 {
    match *dist {
        InitialDistribution::Normal { sigma, .. } => {
            2.0 * (1.0 - Normal::new(0.0, sigma).expect("positive sigma").cdf(c))
        }
        InitialDistribution::Uniform { a, b } => {
            let half = 0.5 * (b - a);
            ((half - c) / half).max(0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEstimate {
    pub n: usize,
    /// Fraction of members of concordant draws lying farther than `c` from the draw mean.
    pub p_hat: f64,
    /// Number of concordant draws among the trials.
    pub concordant: u64,
    pub trials: u64,
}

/// Conditional Monte Carlo for `p_n`: draw `n` opinions, keep concordant draws,
/// count members more than `c` from the mean. `p_hat` is NaN if no draw was concordant.
pub fn jump_probability_mc<R: Rng + ?Sized>(
    n: usize,
    dist: &InitialDistribution,
    c: f64,
    trials: u64,
    rng: &mut R,
) -> Result<JumpEstimate> {
    if n < 2 {
        return Err(Error::invalid(format!("hyperedge size must be at least 2, got {n}")));
    }
    dist.validate()?;
    let mut buf = vec![0.0; n];
    let mut concordant = 0u64;
    let mut far = 0u64;
    for _ in 0..trials {
        dist.fill(rng, &mut buf);
        let w: Welford = buf.iter().copied().collect();
        if w.sample_variance() < c {
            concordant += 1;
            let mean: KahanSum = buf.iter().copied().collect();
            let mean = mean.total() / n as f64;
            far += buf.iter().filter(|&&x| (x - mean).abs() > c).count() as u64;
        }
    }
    Ok(JumpEstimate {
        n,
        p_hat: far as f64 / (concordant * n as u64) as f64,
        concordant,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::apply_edge;
    use crate::hypergraph::Hyperedge;
    use crate::stats::trial_rng;
    use crate::OpinionState;
    use proptest::prelude::*;

    fn single(n: usize, a_n: f64, p_n: f64) -> JumpModelInputs {
        JumpModelInputs {
            sizes: vec![n],
            g: vec![1.0],
            a_n: vec![a_n],
            p_n: vec![p_n],
            a: 0.0,
            p: 0.0,
        }
    }

    #[test]
    fn zero_jump_probability() {
        assert_eq!(expected_jumps(&single(7, 0.9, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn single_size_value() {
        assert!((expected_jumps(&single(3, 0.5, 0.2)).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn forced_size_three_matches_estimates() {
        // Count jumps directly on forced size-3 picks and compare with a_3 * p_3 * 3.
        let dist = InitialDistribution::Normal { mu: 0.0, sigma: 0.8 };
        let c = 0.5;
        let trials = 200_000u64;
        let mut rng = trial_rng(11, 0);
        let e = Hyperedge::new([0, 1, 2]).unwrap();
        let mut total = 0u64;
        for _ in 0..trials {
            let mut s = OpinionState::new(dist.sample_n(&mut rng, 3)).unwrap();
            total += apply_edge(&mut s, &e, c, 1.0).jumps as u64;
        }
        let direct = total as f64 / trials as f64;
        let mut rng = trial_rng(11, 1);
        let est = jump_probability_mc(3, &dist, c, trials, &mut rng).unwrap();
        let a3 = est.concordant as f64 / trials as f64;
        let model = expected_jumps(&single(3, a3, est.p_hat)).unwrap();
        assert!((direct - model).abs() < 0.01, "{direct} vs {model}");
    }

    #[test]
    fn concentrates_on_large_sizes() {
        let (a, p) = (1.0, 0.2);
        let sizes: Vec<usize> = (1000..1010).collect();
        let g = vec![0.1; 10];
        let inputs = JumpModelInputs {
            a_n: vec![a; 10],
            p_n: sizes.iter().map(|&n| p + 1.0 / (n * n) as f64).collect(),
            sizes,
            g,
            a,
            p,
        };
        let j = expected_jumps(&inputs).unwrap();
        let asym = p * a * inputs.mean_size();
        assert!((j / asym - 1.0).abs() < 1e-4);
    }

    #[test]
    fn single_probability() {
        let u = InitialDistribution::Uniform { a: -2.0, b: 2.0 };
        assert!((single_jump_probability(&u, 1.0) - 0.5).abs() < 1e-15);
        let nrm = InitialDistribution::Normal { mu: 0.0, sigma: 1.0 };
        assert!((single_jump_probability(&nrm, 1.0) - 0.317_310_507_862_914).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn expansion_is_identity(
            raw in prop::collection::vec((2usize..400, 0.0f64..1.0, 0.0f64..1.0, 0.001f64..1.0), 1..30),
            a in 0.0f64..1.0,
            p in 0.0f64..1.0,
        ) {
            let total: f64 = raw.iter().map(|r| r.3).sum();
            let inputs = JumpModelInputs {
                sizes: raw.iter().map(|r| r.0).collect(),
                g: raw.iter().map(|r| r.3 / total).collect(),
                a_n: raw.iter().map(|r| r.1).collect(),
                p_n: raw.iter().map(|r| r.2).collect(),
                a,
                p,
            };
            let direct = expected_jumps(&inputs).unwrap();
            let parts = expected_jumps_expanded(&inputs).unwrap();
            let sum: f64 = parts.iter().sum();
            let scale = parts.iter().map(|x| x.abs()).sum::<f64>().max(direct.abs()).max(1e-300);
            prop_assert!((direct - sum).abs() <= 1e-12 * scale, "{} vs {}", direct, sum);
        }
    }
}
