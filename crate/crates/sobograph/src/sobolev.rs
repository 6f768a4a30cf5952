//! The closed-form Sobolev transport distance and its companions: a sliced
//! multi-root variant, the isometric feature embedding into an edge-indexed
//! ℓ_p space, and the inverse map from feature vectors back to measures.
//!
//! For measures supported on vertices the distance is
//!
//! ```text
//! S_p(μ, ν) = ( Σ_e  w_e · |μ(γ_e) − ν(γ_e)|^p )^{1/p}
//! ```
//!
//! where γ_e is the descendant set of edge `e` in the shortest-path tree of
//! the chosen root. Only edges crossed by some support's root path can
//! contribute, so evaluation is linear in that restricted edge set.
//!
//! Numerical contract: terms are accumulated in ascending edge-id order with
//! compensated summation, each term is computed as
//! `|w^{1/p}·μ(γ_e) − w^{1/p}·ν(γ_e)|^p`, and exact zeros are skipped. The
//! same routine backs [`lp_distance`], which makes the embedding isometry
//! bitwise: `lp_distance(embed(μ), embed(ν), p) == sobolev_distance(μ, ν, p)`.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measure::DiscreteMeasure;
use crate::numeric::{abs_pow, conjugate_reciprocal, root_pow, KahanSum};
use crate::root_index::{edge_mass_profile, EdgeMassProfile, RootIndex};

/// Validate a distance order: finite and at least 1. Infinity is refused —
/// the closed form only covers finite orders.
pub fn check_order(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(p))
    }
}

#[inline]
fn finish(sum: f64, p: f64) -> f64 {
    if p == 1.0 {
        sum
    } else if p == 2.0 {
        sum.sqrt()
    } else {
        sum.powf(1.0 / p)
    }
}

/// Σ_e |w^{1/p}·a_e − w^{1/p}·b_e|^p over the union of both profiles'
/// supports, ascending edge ids, compensated, zeros skipped. This is
/// S_p(μ,ν)^p.
fn profile_power_sum(idx: &RootIndex, a: &EdgeMassProfile, b: &EdgeMassProfile, p: f64) -> f64 {
    let mut acc = KahanSum::new();
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        let (edge, ma, mb) = match (ia.peek().copied(), ib.peek().copied()) {
            (Some((ea, ma)), Some((eb, mb))) => {
                if ea == eb {
                    ia.next();
                    ib.next();
                    (ea, ma, mb)
                } else if ea < eb {
                    ia.next();
                    (ea, ma, 0.0)
                } else {
                    ib.next();
                    (eb, 0.0, mb)
                }
            }
            (Some((ea, ma)), None) => {
                ia.next();
                (ea, ma, 0.0)
            }
            (None, Some((eb, mb))) => {
                ib.next();
                (eb, 0.0, mb)
            }
            (None, None) => break,
        };
        let scale = root_pow(idx.weight(edge), p);
        let term = abs_pow(scale * ma - scale * mb, p);
        if term != 0.0 {
            acc.add(term);
        }
    }
    acc.value()
}

/// S_p between two profiles already computed on the same index.
pub fn profile_distance(idx: &RootIndex, a: &EdgeMassProfile, b: &EdgeMassProfile, p: f64) -> Result<f64> {
    check_order(p)?;
    Ok(finish(profile_power_sum(idx, a, b, p), p))
}

/// The Sobolev transport distance S_p(μ, ν) for vertex-supported measures,
/// evaluated through the closed form restricted to edges on the union of
/// support root paths.
pub fn sobolev_distance(
    idx: &RootIndex,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<f64> {
    check_order(p)?;
    let pm = edge_mass_profile(idx, mu)?;
    let pn = edge_mass_profile(idx, nu)?;
    Ok(finish(profile_power_sum(idx, &pm, &pn, p), p))
}

/// S_p(μ, ν)^p — the power sum without the final root. The kernel on the
/// p-th power uses it directly.
pub fn sobolev_distance_pow(
    idx: &RootIndex,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<f64> {
    check_order(p)?;
    let pm = edge_mass_profile(idx, mu)?;
    let pn = edge_mass_profile(idx, nu)?;
    Ok(profile_power_sum(idx, &pm, &pn, p))
}

/// A probability measure over root nodes: the slicing distribution η.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    roots: Vec<usize>,
    weights: Vec<f64>,
}

impl SliceSpec {
    /// Roots with explicit nonnegative weights summing to one (within
    /// 1e-12).
    pub fn new(roots: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidSliceSpec("no roots".into()));
        }
        if roots.len() != weights.len() {
            return Err(Error::InvalidSliceSpec(format!(
                "{} roots but {} weights",
                roots.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidSliceSpec("weights must be nonnegative".into()));
        }
        let total = crate::numeric::kahan_sum(weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::SliceWeightsNotNormalized(total));
        }
        Ok(SliceSpec { roots, weights })
    }

    /// Uniform η over the given roots.
    pub fn uniform(roots: Vec<usize>) -> Result<Self> {
        let k = roots.len();
        if k == 0 {
            return Err(Error::InvalidSliceSpec("no roots".into()));
        }
        let w = 1.0 / k as f64;
        SliceSpec::new(roots, vec![w; k])
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Sliced Sobolev transport: the η-weighted average of per-root distances.
/// `indexes` must correspond one-to-one with `spec.roots()`.
pub fn sliced_sobolev(
    indexes: &[RootIndex],
    spec: &SliceSpec,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<f64> {
    check_order(p)?;
    if indexes.len() != spec.roots.len() {
        return Err(Error::InvalidSliceSpec(format!(
            "{} indexes for {} roots",
            indexes.len(),
            spec.roots.len()
        )));
    }
    let mut acc = KahanSum::new();
    for ((idx, &root), &eta) in indexes.iter().zip(&spec.roots).zip(&spec.weights) {
        if idx.root() != root {
            return Err(Error::RootIndexMismatch {
                index_root: idx.root(),
                expected: root,
            });
        }
        acc.add(eta * sobolev_distance(idx, mu, nu, p)?);
    }
    Ok(acc.value())
}

/// Feature embedding Φ(μ): the vector (w_e^{1/p}·μ(γ_e)) over tree edges in
/// ascending edge-id order. The ℓ_p distance between two embeddings equals
/// the Sobolev transport distance.
pub fn feature_embed(idx: &RootIndex, mu: &DiscreteMeasure, p: f64) -> Result<Vec<f64>> {
    check_order(p)?;
    let profile = edge_mass_profile(idx, mu)?;
    Ok(idx
        .tree_edges()
        .iter()
        .map(|&e| root_pow(idx.weight(e), p) * profile.get(e))
        .collect())
}

/// Plain ℓ_p distance between equal-length vectors, with the same summation
/// contract as the distance evaluation (ascending order, compensation, exact
/// zeros skipped).
pub fn lp_distance(a: &[f64], b: &[f64], p: f64) -> Result<f64> {
    Ok(finish(lp_distance_pow(a, b, p)?, p))
}

/// Σ_i |a_i − b_i|^p.
pub fn lp_distance_pow(a: &[f64], b: &[f64], p: f64) -> Result<f64> {
    check_order(p)?;
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "vector lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut acc = KahanSum::new();
    for (&x, &y) in a.iter().zip(b) {
        let term = abs_pow(x - y, p);
        if term != 0.0 {
            acc.add(term);
        }
    }
    Ok(acc.value())
}

/// Tolerance below which a reconstructed mass may be negative before the
/// profile is rejected as inconsistent.
const RECONSTRUCT_TOL: f64 = 1e-9;

/// Invert the edge-mass map: given a valid α profile, recover the unique
/// measure ρ with `edge_mass_profile(ρ) = α`. The root receives the residual
/// 1 − Σ(root-outgoing α), every other node its parent-edge α minus its
/// child-edge α sum. Rejects profiles outside the feasible set (negative
/// reconstructed mass beyond tolerance).
pub fn reconstruct_measure(idx: &RootIndex, alpha: &EdgeMassProfile) -> Result<DiscreteMeasure> {
    for (e, _) in alpha.iter() {
        if e >= idx.graph_edge_count() || idx.edge_child(e).is_none() {
            return Err(Error::KNotSatisfied(format!(
                "edge {e} is not a tree edge of this index"
            )));
        }
    }
    let n = idx.node_count();
    let mut entries = Vec::new();
    for v in 0..n {
        let incoming = match idx.parent_edge(v) {
            None => 1.0,
            Some(e) => alpha.get(e),
        };
        let mut child_sum = KahanSum::new();
        for &(_, e) in idx.children(v) {
            child_sum.add(alpha.get(e));
        }
        let mass = incoming - child_sum.value();
        if mass < -RECONSTRUCT_TOL {
            return Err(Error::KNotSatisfied(format!(
                "node {v} reconstructs to negative mass {mass}"
            )));
        }
        if mass > 0.0 {
            entries.push((v, mass));
        }
    }
    DiscreteMeasure::new(entries)
}

/// The constant of the order-comparison bound: for 1 ≤ p < q (finite),
/// S_p ≤ λ*(𝔾)^{1/q' − 1/p'} · S_q with conjugate exponents, and
/// 1/q' − 1/p' = 1/p − 1/q.
pub fn upper_bound_factor(g: &Graph, p: f64, q: f64) -> Result<f64> {
    check_order(p)?;
    check_order(q)?;
    if p >= q {
        return Err(Error::InvalidOrderPair { p, q });
    }
    let exponent = conjugate_reciprocal(q) - conjugate_reciprocal(p);
    Ok(g.length_measure_total().powf(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_graph, petersen, random_euclid_graph, random_measure};
    use crate::root_index::build_root_index;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn path_index() -> RootIndex {
        build_root_index(&path_graph(), 0, 1e-9).unwrap()
    }

    #[test]
    fn rejects_bad_orders() {
        let idx = path_index();
        let a = DiscreteMeasure::dirac(1);
        let b = DiscreteMeasure::dirac(2);
        assert!(matches!(
            sobolev_distance(&idx, &a, &b, 0.5),
            Err(Error::InvalidOrder(_))
        ));
        assert!(matches!(
            sobolev_distance(&idx, &a, &b, f64::INFINITY),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn path_closed_form_hand_values() {
        // δ_a vs δ_b on z0-a-b (2,3): only edge <a,b> differs, so
        // S_1 = 3 (= the graph distance) and S_2 = sqrt(3).
        let idx = path_index();
        let da = DiscreteMeasure::dirac(1);
        let db = DiscreteMeasure::dirac(2);
        let s1 = sobolev_distance(&idx, &da, &db, 1.0).unwrap();
        assert!((s1 - 3.0).abs() < 1e-12);
        let s2 = sobolev_distance(&idx, &da, &db, 2.0).unwrap();
        assert!((s2 - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let idx = path_index();
        let mu = DiscreteMeasure::new([(0, 0.2), (2, 0.8)]).unwrap();
        for p in [1.0, 1.5, 2.0] {
            assert_eq!(sobolev_distance(&idx, &mu, &mu, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn restricted_sum_equals_full_sum_oracle() {
        // independent route: brute-force μ(γ_e) from γ memberships for every
        // tree edge, then the naive full-edge summation of w·|Δ|^p
        let g = random_euclid_graph(40, 15, 21);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for p in [1.0, 1.5, 2.0] {
            for _ in 0..10 {
                let mu = random_measure(40, 5, &mut rng);
                let nu = random_measure(40, 5, &mut rng);
                let fast = sobolev_distance(&idx, &mu, &nu, p).unwrap();
                let mut full = 0.0f64;
                for &e in idx.tree_edges() {
                    let members = idx.gamma_members(e);
                    let ma: f64 = members.iter().map(|&u| mu.mass(u)).sum();
                    let mb: f64 = members.iter().map(|&u| nu.mass(u)).sum();
                    full += idx.weight(e) * (ma - mb).abs().powf(p);
                }
                let full = full.powf(1.0 / p);
                assert!(
                    (fast - full).abs() <= 1e-12 * full.max(1e-30),
                    "p={p}: {fast} vs {full}"
                );
            }
        }
    }

    #[test]
    fn embedding_hand_values_and_bitwise_isometry() {
        let idx = path_index();
        let db = DiscreteMeasure::dirac(2);
        let dz = DiscreteMeasure::dirac(0);
        assert_eq!(feature_embed(&idx, &db, 1.0).unwrap(), vec![2.0, 3.0]);
        assert_eq!(feature_embed(&idx, &dz, 1.0).unwrap(), vec![0.0, 0.0]);

        let g = random_euclid_graph(30, 10, 3);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for p in [1.0, 1.5, 2.0] {
            for _ in 0..100 {
                let mu = random_measure(30, 8, &mut rng);
                let nu = random_measure(30, 8, &mut rng);
                let em = feature_embed(&idx, &mu, p).unwrap();
                let en = feature_embed(&idx, &nu, p).unwrap();
                let via_embed = lp_distance(&em, &en, p).unwrap();
                let direct = sobolev_distance(&idx, &mu, &nu, p).unwrap();
                assert_eq!(via_embed.to_bits(), direct.to_bits(), "p={p}");
            }
        }
    }

    #[test]
    fn reconstruction_hand_value_and_roundtrip() {
        let idx = path_index();
        // α = 0 → δ_z0
        let rho = reconstruct_measure(&idx, &EdgeMassProfile::default()).unwrap();
        assert_eq!(rho, DiscreteMeasure::dirac(0));

        // α(<z0,a>) = 1, α(<a,b>) = 1/2 → ½δ_a + ½δ_b
        let alpha = EdgeMassProfile::from_entries([(0, 1.0), (1, 0.5)]).unwrap();
        let rho = reconstruct_measure(&idx, &alpha).unwrap();
        assert_eq!(rho.mass(0), 0.0);
        assert!((rho.mass(1) - 0.5).abs() < 1e-15);
        assert!((rho.mass(2) - 0.5).abs() < 1e-15);

        // roundtrip on random measures
        let g = random_euclid_graph(25, 8, 17);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..50 {
            let mu = random_measure(25, 10, &mut rng);
            let alpha = edge_mass_profile(&idx, &mu).unwrap();
            let back = reconstruct_measure(&idx, &alpha).unwrap();
            assert!(mu.total_variation(&back) <= 1e-12);
            let alpha2 = edge_mass_profile(&idx, &back).unwrap();
            assert_eq!(alpha.len(), alpha2.len());
            for (e, v) in alpha.iter() {
                assert!((v - alpha2.get(e)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn reconstruction_rejects_infeasible_profiles() {
        let idx = path_index();
        // child edge carries more mass than its parent: not a valid α
        let alpha = EdgeMassProfile::from_entries([(0, 0.2), (1, 0.8)]).unwrap();
        assert!(matches!(
            reconstruct_measure(&idx, &alpha),
            Err(Error::KNotSatisfied(_))
        ));
        // mass on a pruned (non-tree) edge of a cyclic graph
        let g = petersen();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let pruned = idx.pruned_edges()[0];
        let alpha = EdgeMassProfile::from_entries([(pruned, 0.3)]).unwrap();
        assert!(matches!(
            reconstruct_measure(&idx, &alpha),
            Err(Error::KNotSatisfied(_))
        ));
    }

    #[test]
    fn sliced_degenerate_and_mean() {
        let g = path_graph();
        let idx0 = build_root_index(&g, 0, 1e-9).unwrap();
        let mu = DiscreteMeasure::dirac(1);
        let nu = DiscreteMeasure::dirac(2);

        let spec = SliceSpec::uniform(vec![0]).unwrap();
        let s = sliced_sobolev(std::slice::from_ref(&idx0), &spec, &mu, &nu, 1.5).unwrap();
        assert_eq!(s, sobolev_distance(&idx0, &mu, &nu, 1.5).unwrap());

        // star graph, two roots, uniform η: the arithmetic mean
        let star = Graph::from_edges(3, &[(0, 1, 1.0), (0, 2, 2.0)]).unwrap();
        let i1 = build_root_index(&star, 1, 1e-9).unwrap();
        let i2 = build_root_index(&star, 2, 1e-9).unwrap();
        let spec = SliceSpec::uniform(vec![1, 2]).unwrap();
        let a = DiscreteMeasure::dirac(0);
        let b = DiscreteMeasure::dirac(1);
        let s = sliced_sobolev(&[i1.clone(), i2.clone()], &spec, &a, &b, 1.0).unwrap();
        let s1 = sobolev_distance(&i1, &a, &b, 1.0).unwrap();
        let s2 = sobolev_distance(&i2, &a, &b, 1.0).unwrap();
        assert!((s - 0.5 * (s1 + s2)).abs() < 1e-15);

        assert_eq!(sliced_sobolev(&[i1, i2], &spec, &a, &a, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sliced_rejects_mismatches() {
        let g = path_graph();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let spec = SliceSpec::uniform(vec![1]).unwrap();
        let mu = DiscreteMeasure::dirac(1);
        assert!(matches!(
            sliced_sobolev(std::slice::from_ref(&idx), &spec, &mu, &mu, 1.0),
            Err(Error::RootIndexMismatch { .. })
        ));
        assert!(SliceSpec::new(vec![0, 1], vec![0.7, 0.2]).is_err());
        assert!(SliceSpec::new(vec![0], vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn upper_bound_factor_values() {
        let g = path_graph(); // λ* = 5
        let f = upper_bound_factor(&g, 1.0, 2.0).unwrap();
        assert!((f - 5.0f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            upper_bound_factor(&g, 2.0, 1.0),
            Err(Error::InvalidOrderPair { .. })
        ));
        assert!(upper_bound_factor(&g, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn upper_bound_holds_on_random_pairs() {
        let g = random_euclid_graph(30, 12, 33);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for &(p, q) in &[(1.0, 1.5), (1.0, 2.0), (1.5, 2.0)] {
            let factor = upper_bound_factor(&g, p, q).unwrap();
            for _ in 0..200 {
                let mu = random_measure(30, 8, &mut rng);
                let nu = random_measure(30, 8, &mut rng);
                let sp = sobolev_distance(&idx, &mu, &nu, p).unwrap();
                let sq = sobolev_distance(&idx, &mu, &nu, q).unwrap();
                assert!(factor * sq - sp >= -1e-9, "(p,q)=({p},{q})");
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_measure(n: usize) -> impl Strategy<Value = DiscreteMeasure> {
            proptest::collection::vec((0..n, 0.01f64..1.0), 1..8)
                .prop_map(|e| DiscreteMeasure::normalized(e).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn metric_axioms(seed in 0u64..200,
                             mu in arb_measure(20),
                             nu in arb_measure(20),
                             sigma in arb_measure(20),
                             p in prop::sample::select(vec![1.0, 1.5, 2.0])) {
                let g = random_euclid_graph(20, 7, seed);
                let idx = build_root_index(&g, 0, 1e-9).unwrap();
                let d_mn = sobolev_distance(&idx, &mu, &nu, p).unwrap();
                let d_nm = sobolev_distance(&idx, &nu, &mu, p).unwrap();
                let d_ms = sobolev_distance(&idx, &mu, &sigma, p).unwrap();
                let d_sn = sobolev_distance(&idx, &sigma, &nu, p).unwrap();
                prop_assert!(d_mn >= 0.0);
                prop_assert_eq!(d_mn.to_bits(), d_nm.to_bits());
                prop_assert!(d_mn <= d_ms + d_sn + 1e-9);
                prop_assert_eq!(sobolev_distance(&idx, &mu, &mu, p).unwrap(), 0.0);
                if d_mn == 0.0 {
                    let pa = edge_mass_profile(&idx, &mu).unwrap();
                    let pb = edge_mass_profile(&idx, &nu).unwrap();
                    prop_assert_eq!(pa, pb);
                }
            }
        }
    }
}
