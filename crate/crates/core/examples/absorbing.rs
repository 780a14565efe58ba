//! Absorbing-state checks: brute force on an explicit hypergraph and the
//! cluster criterion on an implicit one.

use hyperbcm::{extract_clusters, is_absorbing_clustered, is_absorbing_explicit, Hypergraph};

fn main() -> hyperbcm::Result<()> {
    let h = Hypergraph::complete(8)?;
    let explicit = h.to_explicit(8)?;
    for gap in [1.5, 2.5, 3.5] {
        let x: Vec<f64> = (0..8).map(|i| if i < 5 { 0.0 } else { gap }).collect();
        let clusters = extract_clusters(&x, 1e-9);
        println!(
            "clusters 5 @ 0 and 3 @ {gap}: clustered says {}, enumeration says {}",
            is_absorbing_clustered(&clusters, &h, 1.0)?,
            is_absorbing_explicit(&explicit, &x, 1.0, 1e-12)?,
        );
    }

    // The cluster criterion scales to sizes where enumeration is hopeless.
    let big = Hypergraph::complete(10_000)?;
    let x: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { -100.0 } else { 100.0 }).collect();
    println!(
        "two clusters of 5000 at +-100 on the complete hypergraph: absorbing = {}",
        is_absorbing_clustered(&extract_clusters(&x, 1e-9), &big, 1.0)?
    );
    Ok(())
}
