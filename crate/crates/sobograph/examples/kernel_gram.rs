//! Kernels from the transport distance: Gram-matrix computation, the
//! quantile bandwidth grid, a positive-semidefiniteness check, and export
//! in the precomputed-kernel layouts.
//!
//! ```bash
//! cargo run --example kernel_gram
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sobograph::{
    bandwidth_candidates, build_root_index, gram_matrix, min_eigenvalue, sobolev_distance,
    DiscreteMeasure, Graph, KernelFamily, KernelSpec,
};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    // a small random connected graph with Euclidean-style weights
    let n = 40;
    let mut edges: Vec<(usize, usize, f64)> = (1..n)
        .map(|v| (rng.random_range(0..v), v, rng.random_range(0.2..2.0)))
        .collect();
    for _ in 0..30 {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v), rng.random_range(0.2..2.0)));
        }
    }
    let g = Graph::from_edges(n, &edges).unwrap();
    let idx = build_root_index(&g, 0, g.default_tolerance()).unwrap();

    let measures: Vec<DiscreteMeasure> = (0..30)
        .map(|_| {
            let k = rng.random_range(2..8);
            let entries: Vec<(usize, f64)> = (0..k)
                .map(|_| (rng.random_range(0..n), rng.random_range(0.05..1.0)))
                .collect();
            DiscreteMeasure::normalized(entries).unwrap()
        })
        .collect();

    // bandwidth protocol: 1/t from quantiles of observed training distances
    let mut sample = Vec::new();
    for i in 0..measures.len() {
        for j in i + 1..measures.len() {
            sample.push(sobolev_distance(&idx, &measures[i], &measures[j], 1.0).unwrap());
        }
    }
    let candidates = bandwidth_candidates(&sample).unwrap();
    println!("bandwidth candidates ({}): {:?}", candidates.len(), &candidates[..5]);

    let t = candidates[candidates.len() / 2];
    for family in [KernelFamily::Sp, KernelFamily::SpPowP] {
        let p = match family {
            KernelFamily::Sp => 1.0,
            KernelFamily::SpPowP => 2.0,
        };
        let spec = KernelSpec::new(family, p, t).unwrap();
        let gram = gram_matrix(&idx, &measures, &spec).unwrap();
        let min_eig = min_eigenvalue(&gram).unwrap();
        println!(
            "{family:?} p={p} t={t:.4}: {}x{} Gram, min eigenvalue {min_eig:.3e}",
            gram.n(),
            gram.n()
        );
    }

    // export both layouts
    let spec = KernelSpec::new(KernelFamily::Sp, 1.0, t).unwrap();
    let gram = gram_matrix(&idx, &measures, &spec).unwrap();
    let dir = std::env::temp_dir();
    let csv = dir.join("sobograph_example_gram.csv");
    let bin = dir.join("sobograph_example_gram.sgrm");
    gram.save(&csv, false).unwrap();
    gram.save(&bin, true).unwrap();
    println!("wrote {} and {}", csv.display(), bin.display());
}
