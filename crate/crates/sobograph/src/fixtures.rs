//! Shared fixtures for unit tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::graph::Graph;
use crate::measure::DiscreteMeasure;

/// z0 - a - b with weights 2, 3.
pub(crate) fn path_graph() -> Graph {
    Graph::from_edges(3, &[(0, 1, 2.0), (1, 2, 3.0)]).unwrap()
}

/// 10 nodes, 15 unit edges, geodetic, unit diameter-two graph with unique
/// shortest paths from any root. Edge id 5 is the spoke from node 0 to node
/// 5, whose descendant set under root 0 is {5, 7, 8}.
pub(crate) fn petersen() -> Graph {
    let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
    let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
    let inner = [(5, 7), (6, 8), (7, 9), (8, 5), (9, 6)];
    let mut edges = Vec::new();
    for &(u, v) in outer.iter().chain(&spokes).chain(&inner) {
        edges.push((u, v, 1.0));
    }
    Graph::from_edges(10, &edges).unwrap()
}

pub(crate) fn unit_cycle4() -> Graph {
    Graph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap()
}

/// Random tree by uniform attachment with weights in (0.1, 10).
pub(crate) fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|v| (rng.random_range(0..v), v, rng.random_range(0.1..10.0)))
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Sparse connected graph whose weights are Euclidean distances of random
/// planar points, so shortest paths are unique in practice.
pub(crate) fn random_euclid_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let dist = |a: usize, b: usize| {
        let dx = pts[a].0 - pts[b].0;
        let dy = pts[a].1 - pts[b].1;
        (dx * dx + dy * dy).sqrt()
    };
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 1..n {
        let p = rng.random_range(0..v);
        edges.push((p, v, dist(p, v)));
        seen.insert((p.min(v), p.max(v)));
    }
    let mut added = 0;
    while added < extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push((key.0, key.1, dist(key.0, key.1)));
            added += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Random measure on at most `max_supports` distinct nodes of an `n`-node
/// graph.
pub(crate) fn random_measure(n: usize, max_supports: usize, rng: &mut ChaCha20Rng) -> DiscreteMeasure {
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
