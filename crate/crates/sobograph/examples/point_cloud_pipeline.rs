//! The full pipeline from raw point data to distances: cluster the support
//! points, build a random graph metric on the centroids, project measures
//! onto the nodes, then compare them.
//!
//! ```bash
//! cargo run --example point_cloud_pipeline
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sobograph::{
    build_random_graph, build_root_index, enumerate_root_candidates, farthest_point_clustering,
    project_measure, sobolev_distance, BuildSpec, EdgeRule, PointCloud,
};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);

    // two planar blobs standing in for embedded support points
    let mut points = Vec::new();
    for _ in 0..120 {
        points.push(vec![rng.random::<f64>(), rng.random::<f64>()]);
    }
    for _ in 0..80 {
        points.push(vec![3.0 + rng.random::<f64>(), 2.0 + rng.random::<f64>()]);
    }
    let cloud = PointCloud::new(points).unwrap();

    // cluster to at most M sites, then sample a connected graph on them
    let m = 24;
    let clustering = farthest_point_clustering(&cloud, m, 1).unwrap();
    println!(
        "clustered {} points into {} centroids ({} duplicates merged)",
        cloud.len(),
        clustering.centroids.len(),
        clustering.merged_duplicates
    );

    for rule in [EdgeRule::Log, EdgeRule::Sqrt] {
        let spec = BuildSpec::new(m, rule, 9).unwrap();
        let g = build_random_graph(&clustering.centroids, &spec).unwrap();
        println!(
            "{rule:?}: {} nodes, {} edges, connected = {}",
            g.node_count(),
            g.edge_count(),
            g.is_connected()
        );
    }

    let spec = BuildSpec::new(m, EdgeRule::Log, 9).unwrap();
    let g = build_random_graph(&clustering.centroids, &spec).unwrap();

    // two raw measures over the original points: one per blob
    let blob_a: Vec<(usize, f64)> = (0..120).map(|i| (i, 1.0 / 120.0)).collect();
    let blob_b: Vec<(usize, f64)> = (120..200).map(|i| (i, 1.0 / 80.0)).collect();
    let mu = project_measure(&clustering.assignment, &blob_a).unwrap();
    let nu = project_measure(&clustering.assignment, &blob_b).unwrap();
    println!(
        "projected measures touch {} and {} centroids",
        mu.support_len(),
        nu.support_len()
    );

    let tol = g.default_tolerance();
    let roots = enumerate_root_candidates(&g, tol).unwrap();
    let idx = build_root_index(&g, roots[0], tol).unwrap();
    for p in [1.0, 2.0] {
        let d = sobolev_distance(&idx, &mu, &nu, p).unwrap();
        println!("S_{p}(blob A, blob B) = {d:.6}");
    }
    let same = sobolev_distance(&idx, &mu, &mu, 1.0).unwrap();
    println!("S_1(blob A, blob A) = {same}");
}
