//! Helpers shared by the integration suites.
#![allow(dead_code)] // each test binary uses a different subset

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use sobograph::{
    build_random_graph, check_uniqueness, BuildSpec, DiscreteMeasure, EdgeRule, Graph, PointCloud,
};

/// Random tree by uniform attachment, weights uniform in (0.1, 10).
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|v| (rng.random_range(0..v), v, rng.random_range(0.1..10.0)))
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Uniform random planar points.
pub fn random_points(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    PointCloud::new(
        (0..n)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect(),
    )
    .unwrap()
}

/// Random graph with ceil(M log M) Euclidean edges on M random points.
pub fn g_log(m: usize, seed: u64) -> Graph {
    let pc = random_points(m, seed);
    build_random_graph(&pc, &BuildSpec::new(m, EdgeRule::Log, seed).unwrap()).unwrap()
}

/// Random graph with ceil(M^1.5) Euclidean edges on M random points.
pub fn g_sqrt(m: usize, seed: u64) -> Graph {
    let pc = random_points(m, seed);
    build_random_graph(&pc, &BuildSpec::new(m, EdgeRule::Sqrt, seed).unwrap()).unwrap()
}

/// First `k` nodes with unique shortest paths everywhere.
pub fn valid_roots(g: &Graph, k: usize, tol: f64) -> Vec<usize> {
    let roots: Vec<usize> = (0..g.node_count())
        .filter(|&z| check_uniqueness(g, z, tol))
        .take(k)
        .collect();
    assert!(roots.len() == k, "graph yields only {} valid roots", roots.len());
    roots
}

/// Random measure on at most `max_supports` distinct nodes.
pub fn random_measure(n: usize, max_supports: usize, rng: &mut ChaCha20Rng) -> DiscreteMeasure {
    let k = rng.random_range(1..=max_supports.min(n));
    let mut nodes: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        nodes.swap(i, j);
    }
    let entries: Vec<(usize, f64)> = nodes[..k]
        .iter()
        .map(|&v| (v, rng.random_range(0.01..1.0)))
        .collect();
    DiscreteMeasure::normalized(entries).unwrap()
}
