//! Weighted undirected graphs with positive edge lengths: the metric space
//! every distance in this crate is defined on.
//!
//! Nodes are dense indices `0..n`; input files may use arbitrary labels,
//! which are remapped on load and kept in a label table. All distance math
//! uses edge weights exclusively; coordinates (when present) only feed the
//! point-cloud builder.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fs;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::kahan_sum;

/// One undirected edge with a strictly positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    /// The endpoint opposite to `node`.
    pub fn other(&self, node: usize) -> usize {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Weighted undirected graph. Immutable after construction; all queries are
/// pure reads and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    coords: Option<Vec<Vec<f64>>>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>, // (neighbor, edge id)
}

/// Outcome of structural validation. Report-style: violations are flagged,
/// never raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub positive_weights: bool,
    /// True iff some edge is strictly longer than the shortest alternative
    /// path between its endpoints (beyond tolerance).
    pub has_short_cuts: bool,
    pub offending_edges: Vec<usize>,
}

impl Graph {
    /// Build a graph from explicit labels, optional coordinates and weighted
    /// edges. Rejects self-loops, duplicate node pairs, nonpositive or
    /// non-finite weights, duplicate labels and out-of-range endpoints.
    /// Connectivity is *not* enforced here; it is a query (`is_connected`)
    /// and a validation outcome, so that reports can describe broken inputs.
    pub fn new(
        labels: Vec<String>,
        coords: Option<Vec<Vec<f64>>>,
        edge_list: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut label_index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if label_index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node label '{l}'")));
            }
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::InvalidGraph(format!(
                    "{} coordinate rows for {} nodes",
                    c.len(),
                    n
                )));
            }
            let dim = c[0].len();
            for (i, row) in c.iter().enumerate() {
                if row.len() != dim {
                    return Err(Error::InvalidGraph(format!(
                        "node {i} has {}-dimensional coords, expected {dim}",
                        row.len()
                    )));
                }
                if row.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidGraph(format!(
                        "node {i} has non-finite coordinates"
                    )));
                }
            }
        }

        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adj = vec![Vec::new(); n];
        let mut seen_pairs = HashMap::new();
        for (id, (u, v, w)) in edge_list.into_iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} references node {} outside 0..{n}",
                    u.max(v)
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {id} is a self-loop")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} has nonpositive weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if let Some(prev) = seen_pairs.insert(key, id) {
                return Err(Error::InvalidGraph(format!(
                    "edges {prev} and {id} connect the same node pair ({}, {})",
                    key.0, key.1
                )));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
            edges.push(Edge { u, v, w });
        }

        Ok(Graph {
            labels,
            label_index,
            coords,
            edges,
            adj,
        })
    }

    /// Convenience constructor with labels "0", "1", ... and no coordinates.
    pub fn from_edges(n: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Graph::new(labels, None, edge_list.to_vec())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn weight(&self, id: usize) -> f64 {
        self.edges[id].w
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn node_by_label(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(0.0, f64::max)
    }

    /// Total length measure of the graph: Σ_e w_e, summed with compensation.
    pub fn length_measure_total(&self) -> f64 {
        kahan_sum(self.edges.iter().map(|e| e.w))
    }

    pub fn is_connected(&self) -> bool {
        self.unreachable_from(0).is_none()
    }

    /// First node unreachable from `src`, if any.
    fn unreachable_from(&self, src: usize) -> Option<usize> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![src];
        seen[src] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    /// Single-source shortest-path distances via Dijkstra; unreachable nodes
    /// get `f64::INFINITY`. Also returns, per node, the edge through which
    /// the final distance was settled (`None` for src and unreachable nodes).
    pub fn dijkstra(&self, src: usize) -> (Vec<f64>, Vec<Option<usize>>) {
        self.dijkstra_masked(src, None)
    }

    /// Dijkstra with an optional edge excluded (used by the short-cut check).
    fn dijkstra_masked(&self, src: usize, skip_edge: Option<usize>) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![None; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapEntry { d: 0.0, node: src });
        while let Some(HeapEntry { d, node }) = heap.pop() {
            if settled[node] {
                continue;
            }
            settled[node] = true;
            for &(nbr, eid) in &self.adj[node] {
                if Some(eid) == skip_edge || settled[nbr] {
                    continue;
                }
                let cand = d + self.edges[eid].w;
                if cand < dist[nbr] {
                    dist[nbr] = cand;
                    via[nbr] = Some(eid);
                    heap.push(HeapEntry { d: cand, node: nbr });
                }
            }
        }
        (dist, via)
    }

    /// Exact graph metric d(u, v): length of the shortest path.
    pub fn shortest_path_distance(&self, u: usize, v: usize) -> Result<f64> {
        let n = self.node_count();
        if u >= n {
            return Err(Error::UnknownNode(u));
        }
        if v >= n {
            return Err(Error::UnknownNode(v));
        }
        if u == v {
            return Ok(0.0);
        }
        let (dist, _) = self.dijkstra(u);
        if dist[v].is_finite() {
            Ok(dist[v])
        } else {
            Err(Error::Disconnected(v))
        }
    }

    /// Structural validation: connectivity, weight positivity and the
    /// short-cut condition (every edge should be a shortest path between its
    /// endpoints). An edge is a short cut iff the shortest alternative path
    /// is shorter than the edge weight by more than `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let connected = self.is_connected();
        let positive_weights = self.edges.iter().all(|e| e.w > 0.0 && e.w.is_finite());
        let mut offending = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            let (dist, _) = self.dijkstra_masked(e.u, Some(id));
            if dist[e.v] < e.w - tol {
                offending.push(id);
            }
        }
        ValidationReport {
            connected,
            positive_weights,
            has_short_cuts: !offending.is_empty(),
            offending_edges: offending,
        }
    }

    /// Default absolute tolerance used by the CLI: 1e-9 times the largest
    /// edge weight, so floating-point ties never flag valid edges.
    pub fn default_tolerance(&self) -> f64 {
        1e-9 * self.max_weight().max(1e-300)
    }

    /// Subgraph on the same node set keeping only `edge_ids` (renumbered in
    /// the given order). Labels and coordinates are preserved.
    pub fn subgraph_with_edges(&self, edge_ids: &[usize]) -> Result<Graph> {
        let list = edge_ids
            .iter()
            .map(|&id| {
                let e = self.edges[id];
                (e.u, e.v, e.w)
            })
            .collect();
        Graph::new(self.labels.clone(), self.coords.clone(), list)
    }

    /// Copy of the graph with multiplicatively jittered weights
    /// w_e ← w_e·(1 + eps·u_e), u_e uniform in (0, 1), seeded. Used to
    /// restore shortest-path uniqueness on symmetric inputs.
    pub fn perturb_weights(&self, eps: f64, seed: u64) -> Graph {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        let list = self
            .edges
            .iter()
            .map(|e| {
                let u: f64 = rng.random::<f64>();
                (e.u, e.v, e.w * (1.0 + eps * u))
            })
            .collect();
        Graph::new(self.labels.clone(), self.coords.clone(), list)
            .expect("jitter keeps weights positive")
    }

    /// Load a graph from the JSON format
    /// `{ "nodes": [{"id": ..., "coords": [...]}], "edges": [{"u":..,"v":..,"w":..}] }`.
    /// Node ids may be strings or numbers and are remapped to dense indices;
    /// nonpositive weights are rejected with the line and column of the
    /// offending entry.
    pub fn load_json(path: impl AsRef<Path>) -> Result<Graph> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let file: GraphFile = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        file.into_graph()
            .map_err(|e| match e {
                Error::InvalidGraph(msg) => Error::parse(path.display().to_string(), msg),
                other => other,
            })
    }

    /// Write the graph in the JSON interchange format, one node/edge object
    /// per line.
    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = GraphFile {
            nodes: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| NodeRecord {
                    id: serde_json::Value::String(l.clone()),
                    coords: self.coords.as_ref().map(|c| c[i].clone()),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    u: serde_json::Value::String(self.labels[e.u].clone()),
                    v: serde_json::Value::String(self.labels[e.v].clone()),
                    w: PositiveWeight(e.w),
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

#[derive(Debug)]
struct HeapEntry {
    d: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance; weights are validated finite so total order
        // on the reachable frontier is safe
        other
            .d
            .partial_cmp(&self.d)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Weight wrapper whose deserializer rejects nonpositive values, so that
/// serde_json attaches the line/column of the offending edge to the error.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(transparent)]
struct PositiveWeight(f64);

impl<'de> Deserialize<'de> for PositiveWeight {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let w = f64::deserialize(deserializer)?;
        if !w.is_finite() || w <= 0.0 {
            return Err(D::Error::custom(format!(
                "edge weight must be positive and finite, got {w}"
            )));
        }
        Ok(PositiveWeight(w))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    u: serde_json::Value,
    v: serde_json::Value,
    w: PositiveWeight,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

fn label_of(value: &serde_json::Value) -> Result<String> {
    match value {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::InvalidGraph(format!(
            "node id must be a string or number, got {other}"
        ))),
    }
}

impl GraphFile {
    fn into_graph(self) -> Result<Graph> {
        let mut labels = Vec::with_capacity(self.nodes.len());
        let mut coords = Vec::new();
        let mut with_coords = 0usize;
        for node in &self.nodes {
            labels.push(label_of(&node.id)?);
            if let Some(c) = &node.coords {
                with_coords += 1;
                coords.push(c.clone());
            }
        }
        let coords = if with_coords == 0 {
            None
        } else if with_coords == self.nodes.len() {
            Some(coords)
        } else {
            return Err(Error::InvalidGraph(
                "either all nodes or no nodes must carry coords".into(),
            ));
        };
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node label '{l}'")));
            }
        }
        let mut edge_list = Vec::with_capacity(self.edges.len());
        for rec in &self.edges {
            let u = label_of(&rec.u)?;
            let v = label_of(&rec.v)?;
            let ui = *index
                .get(&u)
                .ok_or_else(|| Error::UnknownLabel(u.clone()))?;
            let vi = *index
                .get(&v)
                .ok_or_else(|| Error::UnknownLabel(v.clone()))?;
            edge_list.push((ui, vi, rec.w.0));
        }
        Graph::new(labels, coords, edge_list)
    }
}
