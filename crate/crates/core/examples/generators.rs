//! Random hypergraphs: G(N, m), a hypergraph SBM, and the text file format.

use hyperbcm::generators::{gen_gnm, gen_hsbm, load_hypergraph, save_hypergraph, GnmParams, HsbmMode, HsbmParams};
use hyperbcm::stats::trial_rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = trial_rng(7, 0);

    let gnm = gen_gnm(&GnmParams::new(30, [(2, 40), (3, 25), (5, 10)]), &mut rng)?;
    let dist: Vec<(usize, f64)> = gnm.size_distribution().into_iter().enumerate().filter(|p| p.1 > 0.0).collect();
    println!("G(30, m): {} hyperedges, size shares {dist:?}", gnm.edge_count());

    let params = HsbmParams {
        community_sizes: vec![6, 6],
        p: 0.6,
        q: 0.05,
        max_mixed_size: Some(3),
    };
    let hsbm = gen_hsbm(&params, &mut rng, HsbmMode::default())?;
    println!("(p, q, M)-HSBM on 6 + 6 nodes: {} hyperedges", hsbm.edge_count());

    // Two cliques joined by every mixed pair and triple, without listing them.
    let big = HsbmParams {
        community_sizes: vec![1000, 1000],
        p: 1.0,
        q: 1.0,
        max_mixed_size: Some(3),
    };
    let implicit = gen_hsbm(&big, &mut rng, HsbmMode::Implicit)?;
    println!("implicit HSBM on 2000 nodes: about 10^{} hyperedges", implicit.edge_count().to_string().len() - 1);
    let sizes: Vec<usize> = (0..8).map(|_| implicit.sample_uniform_hyperedge(&mut rng).map(|e| e.size())).collect::<Result<_, _>>()?;
    println!("sizes of eight uniform draws: {sizes:?}");

    let dir = std::env::temp_dir().join("hyperbcm-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("gnm.txt");
    save_hypergraph(&gnm, &path)?;
    let back = load_hypergraph(&path)?;
    println!("wrote {} and read it back: identical = {}", path.display(), back.hypergraph == gnm);
    Ok(())
}
