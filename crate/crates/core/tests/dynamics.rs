use hyperbcm::dynamics::{apply_edge, DEFAULT_ZERO_TOL};
use hyperbcm::generators::{gen_gnm, GnmParams};
use hyperbcm::stats::{kahan_mean, trial_rng};
use hyperbcm::{
    discordance, extract_clusters, is_absorbing_clustered, is_absorbing_explicit, run, Hyperedge, Hypergraph,
    InitialDistribution, OpinionState, SimConfig, Simulation, StopRule,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn random_graph(n: usize, seed: u64) -> Hypergraph {
    let m = (2..=n.min(6)).map(|k| (k, 2 * n as u64));
    gen_gnm(&GnmParams::new(n, m), &mut trial_rng(seed, 0)).unwrap()
}

fn opinions(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mean_is_conserved_step_by_step(n in 3usize..40, seed in any::<u64>(), sigma in 0.3..2.0f64) {
        let h = random_graph(n, seed);
        let cfg = SimConfig::new(1.0, InitialDistribution::Normal { mu: 0.5, sigma }, seed, StopRule::MaxSteps { steps: 0 });
        let mut sim = Simulation::new(&h, &cfg).unwrap();
        let start = kahan_mean(sim.state().opinions());
        let mut prev = start;
        for _ in 0..500 {
            sim.step_in_place().unwrap();
            let m = kahan_mean(sim.state().opinions());
            prop_assert!((m - prev).abs() <= 1e-12 * prev.abs().max(1.0));
            prev = m;
        }
        prop_assert!((prev - start).abs() <= 1e-8);
    }

    #[test]
    fn update_does_not_raise_superset_discordance(
        x in opinions(12),
        e in subsequence((0u32..12).collect::<Vec<_>>(), 2..=12),
        extra in subsequence((0u32..12).collect::<Vec<_>>(), 0..=12),
    ) {
        let mut sup: Vec<u32> = e.iter().chain(&extra).copied().collect();
        sup.sort_unstable();
        sup.dedup();
        let mut state = OpinionState::new(x).unwrap();
        let before = discordance(&sup, state.opinions(), 1.0).unwrap();
        let global = state.global_discordance();
        apply_edge(&mut state, &Hyperedge::new(e).unwrap(), 100.0, 1.0);
        prop_assert!(discordance(&sup, state.opinions(), 1.0).unwrap() <= before + 1e-12);
        prop_assert!(state.global_discordance() <= global + 1e-12);
    }

    #[test]
    fn global_discordance_never_increases(n in 3usize..60, seed in any::<u64>(), sigma in 0.3..2.0f64) {
        let h = random_graph(n, seed);
        let cfg = SimConfig::new(1.0, InitialDistribution::Normal { mu: 0.0, sigma }, seed, StopRule::MaxSteps { steps: 0 });
        let mut sim = Simulation::new(&h, &cfg).unwrap();
        let mut d = sim.state().global_discordance();
        for _ in 0..1000 {
            sim.step_in_place().unwrap();
            let next = sim.state().global_discordance();
            prop_assert!(next <= d + 1e-12);
            d = next;
        }
    }

    #[test]
    fn discordant_edge_leaves_opinions_alone(x in opinions(6), c in 0.0..0.5f64) {
        let e = Hyperedge::new(0..6).unwrap();
        prop_assume!(discordance(e.members(), &x, 1.0).unwrap() >= c);
        let mut state = OpinionState::new(x.clone()).unwrap();
        let out = apply_edge(&mut state, &e, c, 1.0);
        prop_assert!(!out.updated);
        prop_assert_eq!(out.jumps, 0);
        prop_assert_eq!(state.opinions(), &x[..]);
    }

    #[test]
    fn unnormalized_discordance_grows_with_the_edge(
        x in opinions(10),
        e in subsequence((0u32..10).collect::<Vec<_>>(), 2..=10),
        extra in subsequence((0u32..10).collect::<Vec<_>>(), 0..=10),
    ) {
        let mut sup: Vec<u32> = e.iter().chain(&extra).copied().collect();
        sup.sort_unstable();
        sup.dedup();
        let small = discordance(&e, &x, 0.0).unwrap();
        let big = discordance(&sup, &x, 0.0).unwrap();
        prop_assert!(small <= big + 1e-12 * big.max(1.0));
    }

    #[test]
    fn runs_are_reproducible(n in 3usize..30, seed in any::<u64>()) {
        let h = random_graph(n, seed);
        let stop = StopRule::any([StopRule::AbsorbingCheck { every: None }, StopRule::MaxSteps { steps: 5000 }]);
        let cfg = SimConfig::new(1.0, InitialDistribution::Uniform { a: -1.0, b: 1.0 }, seed, stop);
        let a = run(&h, &cfg).unwrap();
        let b = run(&h, &cfg).unwrap();
        prop_assert_eq!(a.t_star, b.t_star);
        prop_assert_eq!(a.stop_reason, b.stop_reason);
        let bits = |s: &hyperbcm::SimSummary| s.final_state.opinions().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn clustered_check_matches_enumeration(
        n in 2usize..=12,
        values in prop::collection::vec(-2.0..2.0f64, 1..=4),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 12),
        c in 0.05..2.0f64,
    ) {
        let x: Vec<f64> = (0..n)
            .map(|i| if i < values.len() { values[i] } else { values[picks[i].index(values.len())] })
            .collect();
        let h = Hypergraph::complete(n).unwrap();
        let fast = is_absorbing_clustered(&extract_clusters(&x, 0.0), &h, c).unwrap();
        let slow = is_absorbing_explicit(&h.to_explicit(12).unwrap(), &x, c, DEFAULT_ZERO_TOL).unwrap();
        prop_assert_eq!(fast, slow);
    }
}
