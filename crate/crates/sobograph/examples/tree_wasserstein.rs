//! On a tree, the order-1 distance coincides with exact 1-Wasserstein under
//! the path metric. On general graphs, spanning-tree extraction gives the
//! classic tree-Wasserstein baseline.
//!
//! ```bash
//! cargo run --example tree_wasserstein
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sobograph::{
    build_root_index, exact_w1, minimum_spanning_tree, random_spanning_tree, sobolev_distance,
    tree_wasserstein, DiscreteMeasure, Graph,
};

fn random_measure(n: usize, rng: &mut ChaCha20Rng) -> DiscreteMeasure {
    let k = rng.random_range(2..=6);
    let entries: Vec<(usize, f64)> = (0..k)
        .map(|_| (rng.random_range(0..n), rng.random_range(0.05..1.0)))
        .collect();
    DiscreteMeasure::normalized(entries).unwrap()
}

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);

    // random tree: S_1 equals the exact optimal transport cost
    let n = 15;
    let edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|v| (rng.random_range(0..v), v, rng.random_range(0.5..3.0)))
        .collect();
    let tree = Graph::from_edges(n, &edges).unwrap();
    let idx = build_root_index(&tree, 0, 1e-9).unwrap();

    println!("random tree, {n} nodes:");
    for trial in 0..5 {
        let mu = random_measure(n, &mut rng);
        let nu = random_measure(n, &mut rng);
        let s1 = sobolev_distance(&idx, &mu, &nu, 1.0).unwrap();
        let w1 = exact_w1(&tree, &mu, &nu).unwrap();
        let tw = tree_wasserstein(&idx, &mu, &nu).unwrap();
        println!("  trial {trial}: S_1 = {s1:.12}, exact W_1 = {w1:.12}, TW = {tw:.12}");
        assert!((s1 - w1).abs() <= 1e-9 * w1.max(1.0));
    }

    // general graph: sample spanning trees for the TW baseline
    let mut edges = Vec::new();
    for v in 1..12usize {
        edges.push((rng.random_range(0..v), v, rng.random_range(0.5..3.0)));
    }
    edges.push((0, 11, 4.2));
    edges.push((3, 9, 1.1));
    edges.push((2, 7, 2.6));
    let g = Graph::from_edges(12, &edges).unwrap();
    let mu = random_measure(12, &mut rng);
    let nu = random_measure(12, &mut rng);

    let w1 = exact_w1(&g, &mu, &nu).unwrap();
    println!("\ngeneral graph: exact W_1 = {w1:.6}");
    for seed in 0..3 {
        let t = random_spanning_tree(&g, seed).unwrap();
        let tidx = build_root_index(&t, 0, 1e-9).unwrap();
        let tw = tree_wasserstein(&tidx, &mu, &nu).unwrap();
        println!("  TW on random spanning tree (seed {seed}): {tw:.6}");
    }
    let mst = minimum_spanning_tree(&g).unwrap();
    let midx = build_root_index(&mst, 0, 1e-9).unwrap();
    let tw = tree_wasserstein(&midx, &mu, &nu).unwrap();
    println!("  TW on the minimum spanning tree:       {tw:.6}");
}
