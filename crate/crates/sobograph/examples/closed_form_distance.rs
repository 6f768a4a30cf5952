//! The closed-form transport distance on a small graph, step by step: the
//! shortest-path tree, per-edge descendant masses, and the weighted ℓ_p
//! aggregation. Also shows the order-comparison bound between different p.
//!
//! ```bash
//! cargo run --example closed_form_distance
//! ```

use sobograph::{
    build_root_index, edge_mass_profile, sobolev_distance, upper_bound_factor, DiscreteMeasure,
    Graph,
};

fn main() {
    // z0 --2.0-- a --3.0-- b
    let g = Graph::from_edges(3, &[(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
    let idx = build_root_index(&g, 0, 1e-9).unwrap();

    println!("graph: z0 --2.0-- a --3.0-- b, root z0");
    for &e in idx.tree_edges() {
        println!(
            "  edge {e} (w = {}): descendant set {:?}",
            idx.weight(e),
            idx.gamma_members(e)
        );
    }

    let mu = DiscreteMeasure::dirac(1); // δ_a
    let nu = DiscreteMeasure::dirac(2); // δ_b
    let pm = edge_mass_profile(&idx, &mu).unwrap();
    let pn = edge_mass_profile(&idx, &nu).unwrap();
    println!("\nμ = δ_a profile: {:?}", pm.iter().collect::<Vec<_>>());
    println!("ν = δ_b profile: {:?}", pn.iter().collect::<Vec<_>>());

    // Only the <a,b> edge separates the two measures, so
    // S_1 = 3 (the graph distance) and S_2 = sqrt(3).
    for p in [1.0, 1.5, 2.0] {
        let d = sobolev_distance(&idx, &mu, &nu, p).unwrap();
        println!("S_{p}(δ_a, δ_b) = {d}");
    }

    // Mixed masses: every edge the supports' root paths touch contributes.
    let rho = DiscreteMeasure::new([(0, 0.5), (2, 0.5)]).unwrap();
    let d = sobolev_distance(&idx, &mu, &rho, 1.0).unwrap();
    println!("S_1(δ_a, ½δ_z0 + ½δ_b) = {d}");

    // Orders compare through the total edge length:
    // S_p <= λ*^(1/p - 1/q) · S_q for p < q.
    let s1 = sobolev_distance(&idx, &mu, &nu, 1.0).unwrap();
    let s2 = sobolev_distance(&idx, &mu, &nu, 2.0).unwrap();
    let factor = upper_bound_factor(&g, 1.0, 2.0).unwrap();
    println!(
        "\norder bound: S_1 = {s1} <= {factor:.6} x S_2 = {:.6}  (λ* = {})",
        factor * s2,
        g.length_measure_total()
    );
}
