//! The sliced variant: averaging the distance over several roots removes
//! the dependence on any single root choice while staying a metric.
//!
//! ```bash
//! cargo run --example sliced_transport
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sobograph::{
    build_root_index, enumerate_root_candidates, sliced_sobolev, sobolev_distance,
    DiscreteMeasure, Graph, SliceSpec,
};

fn main() {
    // a weighted wheel: hub 0, rim 1..=5 (distinct weights keep shortest
    // paths unique)
    let mut edges = Vec::new();
    for i in 1..=5usize {
        edges.push((0, i, 1.0 + 0.01 * i as f64));
    }
    for i in 1..=5usize {
        let j = if i == 5 { 1 } else { i + 1 };
        edges.push((i, j, 0.7 + 0.05 * i as f64));
    }
    let g = Graph::from_edges(6, &edges).unwrap();

    let tol = g.default_tolerance();
    let roots = enumerate_root_candidates(&g, tol).unwrap();
    println!("valid roots: {roots:?}");

    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let entries: Vec<(usize, f64)> = (0..6).map(|v| (v, rng.random::<f64>())).collect();
    let mu = DiscreteMeasure::normalized(entries).unwrap();
    let nu = DiscreteMeasure::new([(2, 0.5), (4, 0.5)]).unwrap();

    // the per-root distances differ...
    let indexes: Vec<_> = roots
        .iter()
        .map(|&z0| build_root_index(&g, z0, tol).unwrap())
        .collect();
    for (idx, &z0) in indexes.iter().zip(&roots) {
        let d = sobolev_distance(idx, &mu, &nu, 1.5).unwrap();
        println!("  S_1.5 with root {z0}: {d:.6}");
    }

    // ...the slice averages them under a chosen weighting
    let uniform = SliceSpec::uniform(roots.clone()).unwrap();
    let d = sliced_sobolev(&indexes, &uniform, &mu, &nu, 1.5).unwrap();
    println!("sliced (uniform over {} roots): {d:.6}", roots.len());

    // degenerate slice = plain distance
    let single = SliceSpec::uniform(vec![roots[0]]).unwrap();
    let d0 = sliced_sobolev(&indexes[..1], &single, &mu, &nu, 1.5).unwrap();
    assert_eq!(d0, sobolev_distance(&indexes[0], &mu, &nu, 1.5).unwrap());
    println!("single-root slice equals the plain distance: {d0:.6}");
}
