//! Per-root preprocessing: shortest-path tree from a chosen root, uniqueness
//! verification, descendant (γ) sets per tree edge, and pruning of edges no
//! shortest path uses.
//!
//! Everything downstream — distances, embeddings, kernels — consumes a
//! [`RootIndex`]. Building one is a single Dijkstra pass plus an O(|E|) scan
//! that also detects violations of the unique-shortest-path requirement.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measure::DiscreteMeasure;

/// How [`edge_mass_profile`] aggregates support masses onto tree edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    /// Walk each support's parent chain; O(Σ depth of supports) per measure.
    PathWalk,
    /// Scatter masses then accumulate child-to-parent over the whole tree;
    /// O(|V|) per measure. Selected automatically for deep trees.
    SubtreeSum,
}

/// Average root-path length above which profile computation switches to
/// subtree sums.
const DEEP_TREE_THRESHOLD: f64 = 64.0;

/// Mass of a measure on every tree edge's descendant set: the value at edge
/// `e` is μ(γ_e), the total mass whose root path crosses `e`. Zero entries
/// (including all pruned edges) are absent. This is also the α coordinate
/// vector of the feature embedding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeMassProfile {
    values: BTreeMap<usize, f64>,
}

impl EdgeMassProfile {
    pub fn get(&self, edge: usize) -> f64 {
        self.values.get(&edge).copied().unwrap_or(0.0)
    }

    /// Nonzero entries in ascending edge-id order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&e, &m)| (e, m))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Build directly from (edge, value) pairs; used when replaying a stored
    /// α vector. Values must be finite and nonnegative.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (e, m) in entries {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::KNotSatisfied(format!(
                    "edge {e} carries invalid mass {m}"
                )));
            }
            if m > 0.0 {
                values.insert(e, m);
            }
        }
        Ok(EdgeMassProfile { values })
    }
}

/// Immutable preprocessing product for one root: the shortest-path tree, per
/// node distances and parent pointers, and the edge bookkeeping needed to
/// evaluate distances without touching the graph again.
#[derive(Debug, Clone, PartialEq)]
pub struct RootIndex {
    root: usize,
    dist: Vec<f64>,
    parent_edge: Vec<Option<usize>>,
    parent_node: Vec<Option<usize>>,
    children: Vec<Vec<(usize, usize)>>, // (child node, edge id), ascending child id
    bfs_order: Vec<usize>,
    depth: Vec<u32>,
    tree_edges: Vec<usize>,
    pruned_edges: Vec<usize>,
    edge_child: Vec<Option<usize>>,
    edge_weight: Vec<f64>,
    mode: ProfileMode,
}

/// What to do when two distinct parent edges reach a node at equal length
/// within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Reject the root: the unique-shortest-path requirement is a
    /// correctness precondition of the closed form.
    #[default]
    Error,
    /// Keep the lowest-id tight edge. Exploratory use only: the result is a
    /// well-defined tree but no longer canonical, which departs from the
    /// unique-path model everything else assumes.
    Lexicographic,
}

/// (distances, parent edge per node, parent node per node)
type ScanResult = (Vec<f64>, Vec<Option<usize>>, Vec<Option<usize>>);

/// Run Dijkstra from `z0` and derive the unique parent edge of every node.
/// Fails when some node is unreachable or — under [`TiePolicy::Error`] —
/// when two distinct parent edges reach a node at equal length within `tol`.
fn scan_root(g: &Graph, z0: usize, tol: f64, policy: TiePolicy) -> Result<ScanResult> {
    let n = g.node_count();
    assert!(z0 < n, "root {z0} out of range");
    let (dist, _) = g.dijkstra(z0);
    if let Some(v) = dist.iter().position(|d| !d.is_finite()) {
        return Err(Error::Disconnected(v));
    }
    let mut parent_edge = vec![None; n];
    let mut parent_node = vec![None; n];
    for v in 0..n {
        if v == z0 {
            continue;
        }
        let mut tight: Option<(usize, usize)> = None;
        for &(nbr, eid) in g.neighbors(v) {
            if dist[nbr] + g.weight(eid) <= dist[v] + tol {
                match (tight, policy) {
                    (None, _) => tight = Some((eid, nbr)),
                    (Some((e1, _)), TiePolicy::Error) => {
                        let (e1, e2) = (e1.min(eid), e1.max(eid));
                        return Err(Error::AmbiguousPath {
                            node: v,
                            e1,
                            e2,
                            tol,
                        });
                    }
                    (Some((e1, _)), TiePolicy::Lexicographic) => {
                        if eid < e1 {
                            tight = Some((eid, nbr));
                        }
                    }
                }
            }
        }
        let (eid, nbr) = tight.expect("finite distance implies a tight predecessor");
        parent_edge[v] = Some(eid);
        parent_node[v] = Some(nbr);
    }
    Ok((dist, parent_edge, parent_node))
}

/// True iff [`build_root_index`] would succeed for this root; does not
/// allocate γ sets.
pub fn check_uniqueness(g: &Graph, z0: usize, tol: f64) -> bool {
    scan_root(g, z0, tol, TiePolicy::Error).is_ok()
}

/// All nodes usable as roots, ascending. Errors when no node has unique
/// shortest paths to everywhere (callers may retry after
/// [`Graph::perturb_weights`]).
pub fn enumerate_root_candidates(g: &Graph, tol: f64) -> Result<Vec<usize>> {
    let candidates: Vec<usize> = (0..g.node_count())
        .filter(|&z0| check_uniqueness(g, z0, tol))
        .collect();
    if candidates.is_empty() {
        Err(Error::EmptyRootSet)
    } else {
        Ok(candidates)
    }
}

/// Default root choice: among valid candidates, the one minimizing
/// Σ_v d(z0, v); ties go to the smaller id. A centrality heuristic, not a
/// requirement — any valid root yields a metric.
pub fn select_root(g: &Graph, tol: f64) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for z0 in 0..g.node_count() {
        if let Ok((dist, _, _)) = scan_root(g, z0, tol, TiePolicy::Error) {
            let total = crate::numeric::kahan_sum(dist.iter().copied());
            match best {
                Some((t, _)) if t <= total => {}
                _ => best = Some((total, z0)),
            }
        }
    }
    best.map(|(_, z0)| z0).ok_or(Error::EmptyRootSet)
}

/// Build the preprocessing index for root `z0`.
pub fn build_root_index(g: &Graph, z0: usize, tol: f64) -> Result<RootIndex> {
    build_root_index_with_ties(g, z0, tol, TiePolicy::Error)
}

/// Like [`build_root_index`] with an explicit equal-length-path policy.
pub fn build_root_index_with_ties(
    g: &Graph,
    z0: usize,
    tol: f64,
    policy: TiePolicy,
) -> Result<RootIndex> {
    let (dist, parent_edge, parent_node) = scan_root(g, z0, tol, policy)?;
    assemble(g, z0, dist, parent_edge, parent_node)
}

fn assemble(
    g: &Graph,
    root: usize,
    dist: Vec<f64>,
    parent_edge: Vec<Option<usize>>,
    parent_node: Vec<Option<usize>>,
) -> Result<RootIndex> {
    let n = g.node_count();
    let m = g.edge_count();
    let mut children = vec![Vec::new(); n];
    for (v, (pn, pe)) in parent_node.iter().zip(&parent_edge).enumerate() {
        if let (Some(p), Some(e)) = (pn, pe) {
            children[*p].push((v, *e));
        }
    }
    for c in &mut children {
        c.sort_unstable();
    }

    let mut bfs_order = Vec::with_capacity(n);
    let mut depth = vec![0u32; n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        bfs_order.push(u);
        for &(c, _) in &children[u] {
            depth[c] = depth[u] + 1;
            queue.push_back(c);
        }
    }
    if bfs_order.len() != n {
        return Err(Error::IndexMismatch(
            "parent pointers do not form a spanning tree".into(),
        ));
    }

    let mut edge_child = vec![None; m];
    for (v, pe) in parent_edge.iter().enumerate() {
        if let Some(e) = pe {
            edge_child[*e] = Some(v);
        }
    }
    let mut tree_edges: Vec<usize> = parent_edge.iter().flatten().copied().collect();
    tree_edges.sort_unstable();
    let pruned_edges: Vec<usize> = (0..m).filter(|&e| edge_child[e].is_none()).collect();

    let avg_depth = depth.iter().map(|&d| d as f64).sum::<f64>() / n as f64;
    let mode = if avg_depth > DEEP_TREE_THRESHOLD {
        ProfileMode::SubtreeSum
    } else {
        ProfileMode::PathWalk
    };

    Ok(RootIndex {
        root,
        dist,
        parent_edge,
        parent_node,
        children,
        bfs_order,
        depth,
        tree_edges,
        pruned_edges,
        edge_child,
        edge_weight: g.edges().iter().map(|e| e.w).collect(),
        mode,
    })
}

impl RootIndex {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.dist.len()
    }

    /// Number of edges in the indexed graph (tree and pruned together).
    pub fn graph_edge_count(&self) -> usize {
        self.edge_weight.len()
    }

    pub fn dist(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v]
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.edge_weight[edge]
    }

    /// Shortest-path-tree edges, ascending by original edge id.
    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    /// Edges whose γ set is empty; they contribute nothing to any distance.
    pub fn pruned_edges(&self) -> &[usize] {
        &self.pruned_edges
    }

    /// Deeper endpoint of a tree edge (the node whose parent edge it is).
    pub fn edge_child(&self, edge: usize) -> Option<usize> {
        self.edge_child[edge]
    }

    /// Tree children of `v` as (node, edge) pairs, ascending by node id.
    pub fn children(&self, v: usize) -> &[(usize, usize)] {
        &self.children[v]
    }

    pub fn is_tree(&self) -> bool {
        self.pruned_edges.is_empty() && self.graph_edge_count() + 1 == self.node_count()
    }

    pub fn profile_mode(&self) -> ProfileMode {
        self.mode
    }

    /// Override the automatic profile-mode selection (primarily for tests and
    /// benchmarks; both modes return the same profiles up to summation
    /// order).
    pub fn with_profile_mode(mut self, mode: ProfileMode) -> Self {
        self.mode = mode;
        self
    }

    /// Σ_v d(z0, v); the centrality score used for default root selection.
    pub fn total_distance(&self) -> f64 {
        crate::numeric::kahan_sum(self.dist.iter().copied())
    }

    /// Edge ids on the shortest path [z0, v], ordered from the root outward.
    /// Materialized on demand.
    pub fn path_edges(&self, v: usize) -> Vec<usize> {
        let mut edges = Vec::with_capacity(self.depth[v] as usize);
        let mut cur = v;
        while let Some(e) = self.parent_edge[cur] {
            edges.push(e);
            cur = self.parent_node[cur].expect("parent edge implies parent node");
        }
        edges.reverse();
        edges
    }

    /// γ_e ∩ V: the sorted set of nodes whose root path crosses `edge`.
    /// Empty for pruned edges. Materialized on demand.
    pub fn gamma_members(&self, edge: usize) -> Vec<usize> {
        let Some(top) = self.edge_child[edge] else {
            return Vec::new();
        };
        let mut members = Vec::new();
        let mut stack = vec![top];
        while let Some(u) = stack.pop() {
            members.push(u);
            for &(c, _) in &self.children[u] {
                stack.push(c);
            }
        }
        members.sort_unstable();
        members
    }

    /// Persist root, distances and parent pointers as JSON; γ sets and the
    /// derived orderings are recomputed on load.
    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = IndexFile {
            format: INDEX_FORMAT.to_string(),
            root: self.root,
            dist: self.dist.clone(),
            parent_edge: self.parent_edge.clone(),
        };
        let text = serde_json::to_string(&file)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Load a persisted index and re-derive the tree structure against
    /// `graph`, verifying that the stored distances and parents are
    /// consistent with it.
    pub fn load_json(path: impl AsRef<Path>, graph: &Graph) -> Result<RootIndex> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let file: IndexFile = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        if file.format != INDEX_FORMAT {
            return Err(Error::IndexMismatch(format!(
                "unsupported index format '{}'",
                file.format
            )));
        }
        let n = graph.node_count();
        if file.dist.len() != n || file.parent_edge.len() != n || file.root >= n {
            return Err(Error::IndexMismatch(format!(
                "index describes {} nodes, graph has {n}",
                file.dist.len()
            )));
        }
        let mut parent_node = vec![None; n];
        for (v, &pe) in file.parent_edge.iter().enumerate() {
            match pe {
                None => {
                    if v != file.root {
                        return Err(Error::IndexMismatch(format!(
                            "non-root node {v} lacks a parent edge"
                        )));
                    }
                }
                Some(e) => {
                    if e >= graph.edge_count() {
                        return Err(Error::IndexMismatch(format!(
                            "parent edge {e} outside the graph"
                        )));
                    }
                    let edge = graph.edge(e);
                    if edge.u != v && edge.v != v {
                        return Err(Error::IndexMismatch(format!(
                            "edge {e} is not incident to node {v}"
                        )));
                    }
                    let p = edge.other(v);
                    let expected = file.dist[p] + edge.w;
                    if (expected - file.dist[v]).abs() > 1e-9 * (1.0 + file.dist[v].abs()) {
                        return Err(Error::IndexMismatch(format!(
                            "stored distance of node {v} disagrees with its parent edge"
                        )));
                    }
                    parent_node[v] = Some(p);
                }
            }
        }
        assemble(graph, file.root, file.dist, file.parent_edge, parent_node)
    }
}

const INDEX_FORMAT: &str = "sobograph-index-v1";

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    root: usize,
    dist: Vec<f64>,
    parent_edge: Vec<Option<usize>>,
}

/// μ(γ_e) for every shortest-path-tree edge, in one pass over the measure's
/// supports — never by iterating supports per edge. Depending on the index's
/// [`ProfileMode`] this walks parent chains or accumulates subtree sums.
pub fn edge_mass_profile(idx: &RootIndex, mu: &DiscreteMeasure) -> Result<EdgeMassProfile> {
    if let Some(max) = mu.max_node() {
        if max >= idx.node_count() {
            return Err(Error::MeasureOutOfRange(max));
        }
    }
    let values = match idx.mode {
        ProfileMode::PathWalk => {
            let mut values: BTreeMap<usize, f64> = BTreeMap::new();
            for &(node, mass) in mu.entries() {
                let mut cur = node;
                while let Some(e) = idx.parent_edge[cur] {
                    *values.entry(e).or_insert(0.0) += mass;
                    cur = idx.parent_node[cur].expect("parent edge implies parent node");
                }
            }
            values
        }
        ProfileMode::SubtreeSum => {
            let mut acc = vec![0.0f64; idx.node_count()];
            for &(node, mass) in mu.entries() {
                acc[node] += mass;
            }
            let mut values = BTreeMap::new();
            for &v in idx.bfs_order.iter().rev() {
                if let Some(p) = idx.parent_node[v] {
                    let sub = acc[v];
                    acc[p] += sub;
                    if sub != 0.0 {
                        values.insert(idx.parent_edge[v].unwrap(), sub);
                    }
                }
            }
            values
        }
    };
    Ok(EdgeMassProfile { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_graph, petersen, random_euclid_graph, random_tree, unit_cycle4};

    /// Exhaustive oracle: count shortest paths from z0 to every node by
    /// enumerating simple paths, pruned at the known optimum plus tolerance.
    fn unique_paths_everywhere(g: &Graph, z0: usize, tol: f64) -> bool {
        let n = g.node_count();
        let (dist, _) = g.dijkstra(z0);
        if dist.iter().any(|d| !d.is_finite()) {
            return false;
        }
        let mut counts = vec![0usize; n];
        let mut visited = vec![false; n];
        fn dfs(
            g: &Graph,
            u: usize,
            len: f64,
            dist: &[f64],
            tol: f64,
            visited: &mut [bool],
            counts: &mut [usize],
        ) {
            if len <= dist[u] + tol {
                counts[u] += 1;
            }
            visited[u] = true;
            for &(v, eid) in g.neighbors(u) {
                let next = len + g.weight(eid);
                // a prefix of any shortest path is itself within tolerance
                if !visited[v] && next <= dist[v] + tol {
                    dfs(g, v, next, dist, tol, visited, counts);
                }
            }
            visited[u] = false;
        }
        dfs(g, z0, 0.0, &dist, tol, &mut visited, &mut counts);
        (0..n).all(|v| counts[v] == 1)
    }

    #[test]
    fn path_graph_gamma_sets() {
        let g = path_graph();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        assert_eq!(idx.gamma_members(0), vec![1, 2]);
        assert_eq!(idx.gamma_members(1), vec![2]);
        assert!(idx.pruned_edges().is_empty());
        assert_eq!(idx.path_edges(2), vec![0, 1]);
    }

    #[test]
    fn petersen_gamma_of_root_spoke() {
        // root x1 (id 0); e6 is the spoke <x1, x6> (id 5); its descendant set
        // is {x6, x8, x9} (ids 5, 7, 8)
        let g = petersen();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        assert_eq!(idx.gamma_members(5), vec![5, 7, 8]);
    }

    #[test]
    fn unit_cycle_is_ambiguous() {
        let g = unit_cycle4();
        for z0 in 0..4 {
            match build_root_index(&g, z0, 1e-9) {
                Err(Error::AmbiguousPath { node, .. }) => {
                    assert_eq!(node, (z0 + 2) % 4);
                }
                other => panic!("expected ambiguity, got {other:?}"),
            }
            assert!(!check_uniqueness(&g, z0, 1e-9));
        }
        assert!(matches!(
            enumerate_root_candidates(&g, 1e-9),
            Err(Error::EmptyRootSet)
        ));
    }

    #[test]
    fn lexicographic_policy_breaks_ties() {
        let g = unit_cycle4();
        // default policy refuses; the opt-in policy picks the lowest edge id
        assert!(build_root_index(&g, 0, 1e-9).is_err());
        let idx = build_root_index_with_ties(&g, 0, 1e-9, TiePolicy::Lexicographic).unwrap();
        // node 2 has two tight parent edges (1 and 2); edge 1 wins
        assert_eq!(idx.parent_edge(2), Some(1));
        assert_eq!(idx.tree_edges().len(), 3);
        let mu = DiscreteMeasure::dirac(2);
        let p = edge_mass_profile(&idx, &mu).unwrap();
        assert_eq!(p.get(0), 1.0);
        assert_eq!(p.get(1), 1.0);
        // distances remain a metric over the chosen tree
        let nu = DiscreteMeasure::dirac(0);
        let d = crate::sobolev::sobolev_distance(&idx, &mu, &nu, 1.0).unwrap();
        assert_eq!(d, 2.0);
        assert_eq!(crate::sobolev::sobolev_distance(&idx, &mu, &mu, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn slightly_asymmetric_cycle_is_unique() {
        let g = Graph::from_edges(
            4,
            &[(0, 1, 1.0), (1, 2, 1.0000001), (2, 3, 1.0), (3, 0, 1.0)],
        )
        .unwrap();
        assert!(check_uniqueness(&g, 0, 1e-9));
        // enumerate both paths to the opposite node and confirm they differ
        assert!((2.0000001f64 - 2.0).abs() > 1e-9);
    }

    #[test]
    fn trees_accept_every_root() {
        let g = random_tree(17, 5);
        let roots = enumerate_root_candidates(&g, 1e-9).unwrap();
        assert_eq!(roots, (0..17).collect::<Vec<_>>());
    }

    #[test]
    fn candidate_enumeration_matches_path_counting_oracle() {
        for seed in [1, 2, 3] {
            let g = random_euclid_graph(30, 8, seed);
            let tol = 1e-9;
            let expected: Vec<usize> = (0..30)
                .filter(|&z0| unique_paths_everywhere(&g, z0, tol))
                .collect();
            let got = match enumerate_root_candidates(&g, tol) {
                Ok(v) => v,
                Err(Error::EmptyRootSet) => Vec::new(),
                Err(e) => panic!("{e}"),
            };
            assert_eq!(got, expected, "seed {seed}");
        }
    }

    #[test]
    fn perturbation_restores_uniqueness() {
        let g = unit_cycle4();
        let jittered = g.perturb_weights(1e-9, 7);
        // multiplicative jitter separates the two equal-length paths
        let roots = enumerate_root_candidates(&jittered, 1e-15).unwrap();
        assert!(!roots.is_empty());
    }

    #[test]
    fn profiles_on_path_graph() {
        let g = path_graph();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();

        let delta_b = DiscreteMeasure::dirac(2);
        let p = edge_mass_profile(&idx, &delta_b).unwrap();
        assert_eq!(p.get(0), 1.0);
        assert_eq!(p.get(1), 1.0);

        let delta_root = DiscreteMeasure::dirac(0);
        let p = edge_mass_profile(&idx, &delta_root).unwrap();
        assert!(p.is_empty());

        let half = DiscreteMeasure::new([(1, 0.5), (2, 0.5)]).unwrap();
        let p = edge_mass_profile(&idx, &half).unwrap();
        assert_eq!(p.get(0), 1.0);
        assert_eq!(p.get(1), 0.5);
    }

    #[test]
    fn profile_rejects_foreign_support() {
        let g = path_graph();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let bad = DiscreteMeasure::dirac(7);
        assert!(matches!(
            edge_mass_profile(&idx, &bad),
            Err(Error::MeasureOutOfRange(7))
        ));
    }

    #[test]
    fn both_modes_agree() {
        use rand::Rng;
        use rand::SeedableRng;
        let g = random_euclid_graph(40, 20, 9);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        let walk = idx.clone().with_profile_mode(ProfileMode::PathWalk);
        let sums = idx.with_profile_mode(ProfileMode::SubtreeSum);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let k = rng.random_range(1..10usize);
            let entries: Vec<(usize, f64)> =
                (0..k).map(|_| (rng.random_range(0..40), rng.random::<f64>())).collect();
            let mu = DiscreteMeasure::normalized(entries).unwrap();
            let a = edge_mass_profile(&walk, &mu).unwrap();
            let b = edge_mass_profile(&sums, &mu).unwrap();
            assert_eq!(a.len(), b.len());
            for (e, v) in a.iter() {
                assert!((v - b.get(e)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deep_path_selects_subtree_mode() {
        let n = 200;
        let edges: Vec<(usize, usize, f64)> = (1..n).map(|v| (v - 1, v, 1.0)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        assert_eq!(idx.profile_mode(), ProfileMode::SubtreeSum);
        let shallow = build_root_index(&path_graph(), 0, 1e-9).unwrap();
        assert_eq!(shallow.profile_mode(), ProfileMode::PathWalk);
    }

    #[test]
    fn gamma_membership_matches_path_reconstruction() {
        let g = random_euclid_graph(30, 10, 4);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        for e in 0..g.edge_count() {
            let members = idx.gamma_members(e);
            let by_paths: Vec<usize> = (0..30)
                .filter(|&u| idx.path_edges(u).contains(&e))
                .collect();
            assert_eq!(members, by_paths, "edge {e}");
            if let Some(child) = idx.edge_child(e) {
                for &u in &members {
                    assert!(idx.dist(u) >= idx.dist(child) - 1e-12);
                }
            } else {
                assert!(members.is_empty());
                assert!(idx.pruned_edges().contains(&e));
            }
        }
    }

    #[test]
    fn path_length_consistency_and_nesting() {
        let g = random_euclid_graph(25, 8, 12);
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        for v in 0..25 {
            let total: f64 =
                crate::numeric::kahan_sum(idx.path_edges(v).iter().map(|&e| idx.weight(e)));
            assert!((total - idx.dist(v)).abs() <= 1e-9 * idx.dist(v).max(1.0));
            // nesting: the parent edge's γ set contains each child edge's
            if let Some(pe) = idx.parent_edge(v) {
                let parent_set = idx.gamma_members(pe);
                for &(_, ce) in idx.children(v) {
                    for u in idx.gamma_members(ce) {
                        assert!(parent_set.binary_search(&u).is_ok());
                    }
                }
            }
        }
    }

    #[test]
    fn tree_edge_partition() {
        let g = petersen();
        let idx = build_root_index(&g, 0, 1e-9).unwrap();
        assert_eq!(idx.tree_edges().len(), 9);
        assert_eq!(idx.pruned_edges().len(), 6);
        for &e in idx.tree_edges() {
            assert!(!idx.gamma_members(e).is_empty());
        }
        for &e in idx.pruned_edges() {
            assert!(idx.gamma_members(e).is_empty());
        }
    }

    #[test]
    fn select_root_minimizes_total_distance() {
        // star: center 0 is strictly more central than any leaf
        let g = Graph::from_edges(5, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0), (0, 4, 4.0)])
            .unwrap();
        assert_eq!(select_root(&g, 1e-9).unwrap(), 0);
    }

    #[test]
    fn persistence_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.json");
        let g = petersen();
        let idx = build_root_index(&g, 3, 1e-9).unwrap();
        idx.save_json(&path).unwrap();
        let back = RootIndex::load_json(&path, &g).unwrap();
        assert_eq!(idx, back);

        // wrong graph is rejected
        let other = path_graph();
        assert!(RootIndex::load_json(&path, &other).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_measure(n: usize) -> impl Strategy<Value = DiscreteMeasure> {
            proptest::collection::vec((0..n, 0.01f64..1.0), 1..8)
                .prop_map(|entries| DiscreteMeasure::normalized(entries).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn profile_values_and_constraints(seed in 0u64..500, mu in arb_measure(20)) {
                let g = random_euclid_graph(20, 6, seed);
                let idx = build_root_index(&g, 0, 1e-9).unwrap();
                let p = edge_mass_profile(&idx, &mu).unwrap();
                for (_, v) in p.iter() {
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
                }
                // root residual: outgoing mass <= 1, equality iff mu(z0) = 0
                let out: f64 = idx.children(0).iter().map(|&(_, e)| p.get(e)).sum();
                prop_assert!(out <= 1.0 + 1e-12);
                if mu.mass(0) == 0.0 {
                    prop_assert!((out - 1.0).abs() < 1e-9);
                } else {
                    prop_assert!(out < 1.0);
                }
                // parent dominates children everywhere
                for v in 1..20 {
                    let pe = idx.parent_edge(v).unwrap();
                    let child_sum: f64 = idx.children(v).iter().map(|&(_, e)| p.get(e)).sum();
                    prop_assert!(p.get(pe) >= child_sum - 1e-12);
                }
            }

            #[test]
            fn profile_is_linear(seed in 0u64..500, a in 0.05f64..0.95,
                                 mu in arb_measure(15), nu in arb_measure(15)) {
                let g = random_euclid_graph(15, 5, seed);
                let idx = build_root_index(&g, 0, 1e-9).unwrap();
                let mix_entries: Vec<(usize, f64)> = mu
                    .entries()
                    .iter()
                    .map(|&(n, m)| (n, a * m))
                    .chain(nu.entries().iter().map(|&(n, m)| (n, (1.0 - a) * m)))
                    .collect();
                let mix = DiscreteMeasure::new(mix_entries).unwrap();
                let pm = edge_mass_profile(&idx, &mu).unwrap();
                let pn = edge_mass_profile(&idx, &nu).unwrap();
                let pmix = edge_mass_profile(&idx, &mix).unwrap();
                for &e in idx.tree_edges() {
                    let expect = a * pm.get(e) + (1.0 - a) * pn.get(e);
                    prop_assert!((pmix.get(e) - expect).abs() < 1e-12);
                }
            }
        }
    }
}
