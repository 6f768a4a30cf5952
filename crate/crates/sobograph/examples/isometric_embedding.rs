//! Measures embed isometrically into a plain ℓ_p space indexed by tree
//! edges: distances become vector norms, and the embedding inverts exactly
//! back to a measure.
//!
//! ```bash
//! cargo run --example isometric_embedding
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sobograph::{
    build_root_index, edge_mass_profile, feature_embed, lp_distance, reconstruct_measure,
    sobolev_distance, DiscreteMeasure, EdgeMassProfile, Graph,
};

fn main() {
    let g = Graph::from_edges(
        5,
        &[(0, 1, 1.0), (1, 2, 2.0), (1, 3, 1.5), (3, 4, 0.5), (0, 2, 4.0)],
    )
    .unwrap();
    let idx = build_root_index(&g, 0, 1e-9).unwrap();

    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let rand_measure = |rng: &mut ChaCha20Rng| {
        let entries: Vec<(usize, f64)> = (0..5).map(|v| (v, rng.random::<f64>())).collect();
        DiscreteMeasure::normalized(entries).unwrap()
    };
    let mu = rand_measure(&mut rng);
    let nu = rand_measure(&mut rng);

    let p = 1.5;
    let em = feature_embed(&idx, &mu, p).unwrap();
    let en = feature_embed(&idx, &nu, p).unwrap();
    println!("Φ(μ) = {em:?}");
    println!("Φ(ν) = {en:?}");

    let via_embedding = lp_distance(&em, &en, p).unwrap();
    let direct = sobolev_distance(&idx, &mu, &nu, p).unwrap();
    println!("‖Φ(μ) − Φ(ν)‖_{p} = {via_embedding}");
    println!("S_{p}(μ, ν)        = {direct}");
    assert_eq!(via_embedding.to_bits(), direct.to_bits(), "bitwise equal");

    // the edge-mass vector pins the measure down exactly
    let alpha = edge_mass_profile(&idx, &mu).unwrap();
    let back = reconstruct_measure(&idx, &alpha).unwrap();
    println!("\nround trip TV error: {:.3e}", mu.total_variation(&back));

    // and any feasible vector is some measure: zero maps to δ_root
    let rho = reconstruct_measure(&idx, &EdgeMassProfile::default()).unwrap();
    println!("reconstruct(0) = {:?} (point mass at the root)", rho.entries());
}
