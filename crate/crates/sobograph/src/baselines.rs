//! Exact baselines used both for comparison and as verification oracles:
//! 1-Wasserstein under the graph metric (a balanced transportation problem
//! solved exactly by the transportation simplex) and tree-Wasserstein on
//! spanning trees extracted from the graph.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measure::DiscreteMeasure;
use crate::numeric::KahanSum;
use crate::root_index::RootIndex;
use crate::sobolev::sobolev_distance;

/// Mass-balance tolerance for the transportation problem.
pub const MASS_BALANCE_TOL: f64 = 1e-6;

/// Shortest-path distances between all pairs drawn from the union of two
/// measures' supports. Rows are filled from one Dijkstra per union node and
/// mirrored, so the matrix is exactly symmetric with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    nodes: Vec<usize>,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn for_measures(g: &Graph, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Self> {
        let mut nodes: Vec<usize> = mu.support().chain(nu.support()).collect();
        nodes.sort_unstable();
        nodes.dedup();
        if let Some(&max) = nodes.last() {
            if max >= g.node_count() {
                return Err(Error::MeasureOutOfRange(max));
            }
        }
        let k = nodes.len();
        let mut data = vec![0.0; k * k];
        for (i, &src) in nodes.iter().enumerate() {
            let (dist, _) = g.dijkstra(src);
            for (j, &dst) in nodes.iter().enumerate().skip(i + 1) {
                if !dist[dst].is_finite() {
                    return Err(Error::Disconnected(dst));
                }
                data[i * k + j] = dist[dst];
                data[j * k + i] = dist[dst];
            }
        }
        Ok(CostMatrix { nodes, data })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Entry by position in the node list.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.nodes.len() + j]
    }

    pub fn position(&self, node: usize) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }
}

/// Exact 1-Wasserstein distance between vertex-supported measures with the
/// graph metric as ground cost, via the transportation simplex on the
/// support-to-support problem.
pub fn exact_w1(g: &Graph, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let cm = CostMatrix::for_measures(g, mu, nu)?;
    let supplies: Vec<f64> = mu.entries().iter().map(|&(_, m)| m).collect();
    let demands: Vec<f64> = nu.entries().iter().map(|&(_, m)| m).collect();
    let m = supplies.len();
    let n = demands.len();
    let mut cost = vec![0.0; m * n];
    for (i, &(x, _)) in mu.entries().iter().enumerate() {
        let xi = cm.position(x).expect("support in union");
        for (j, &(y, _)) in nu.entries().iter().enumerate() {
            let yj = cm.position(y).expect("support in union");
            cost[i * n + j] = cm.get(xi, yj);
        }
    }
    transport_cost(&supplies, &demands, &cost)
}

/// Solve the balanced transportation problem min Σ c_ij x_ij subject to the
/// marginal constraints, returning the optimal cost. `cost` is row-major
/// with `demands.len()` columns. Degeneracy is handled with Bland's rule
/// (first eligible entering cell, lowest-index leaving cell), which
/// guarantees termination.
pub fn transport_cost(supplies: &[f64], demands: &[f64], cost: &[f64]) -> Result<f64> {
    let m = supplies.len();
    let n = demands.len();
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("empty transportation problem".into()));
    }
    if cost.len() != m * n {
        return Err(Error::InvalidInput(format!(
            "cost matrix has {} entries, expected {}",
            cost.len(),
            m * n
        )));
    }
    let total_a: f64 = crate::numeric::kahan_sum(supplies.iter().copied());
    let total_b: f64 = crate::numeric::kahan_sum(demands.iter().copied());
    if (total_a - total_b).abs() > MASS_BALANCE_TOL {
        return Err(Error::UnequalMass(total_a, total_b));
    }
    if supplies.iter().chain(demands).any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidInput("negative or non-finite mass".into()));
    }

    let mut flow = vec![0.0f64; m * n];
    let mut basic = vec![false; m * n];

    // northwest-corner initial basis: exactly m+n-1 basic cells, zero
    // allocations kept to preserve the spanning-tree structure
    {
        let mut a = supplies.to_vec();
        let mut b = demands.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let cell = i * n + j;
            basic[cell] = true;
            let q = a[i].min(b[j]);
            flow[cell] = q;
            a[i] -= q;
            b[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if (a[i] <= b[j] && i + 1 < m) || j + 1 >= n {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let max_cost = cost.iter().fold(0.0f64, |acc, &c| acc.max(c.abs()));
    let reduced_tol = 1e-12 * (1.0 + max_cost);
    let pivot_cap = 1000 + 50 * (m + n) * (m + n);

    let mut u = vec![0.0f64; m];
    let mut v = vec![0.0f64; n];

    for _ in 0..pivot_cap {
        // duals from the basis tree (vertices: rows 0..m, cols m..m+n)
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
        for (cell, &is_basic) in basic.iter().enumerate() {
            if is_basic {
                let (i, j) = (cell / n, cell % n);
                adj[i].push((m + j, cell));
                adj[m + j].push((i, cell));
            }
        }
        let mut known = vec![false; m + n];
        u[0] = 0.0;
        known[0] = true;
        let mut stack = vec![0usize];
        while let Some(vertex) = stack.pop() {
            for &(other, cell) in &adj[vertex] {
                if !known[other] {
                    known[other] = true;
                    let (i, j) = (cell / n, cell % n);
                    if other < m {
                        u[i] = cost[cell] - v[j];
                    } else {
                        v[j] = cost[cell] - u[i];
                    }
                    stack.push(other);
                }
            }
        }
        debug_assert!(known.iter().all(|&k| k), "basis must span rows and cols");

        // Bland: first cell with negative reduced cost enters
        let mut entering = None;
        'scan: for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                let cell = i * n + j;
                if !basic[cell] && cost[cell] - ui - vj < -reduced_tol {
                    entering = Some(cell);
                    break 'scan;
                }
            }
        }
        let Some(entering) = entering else {
            let mut obj = KahanSum::new();
            for cell in 0..m * n {
                if flow[cell] != 0.0 {
                    obj.add(flow[cell] * cost[cell]);
                }
            }
            return Ok(obj.value());
        };

        // unique cycle: path between the entering cell's row and column
        // through the basis tree, plus the entering cell itself
        let (ei, ej) = (entering / n, entering % n);
        let target = m + ej;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
        let mut seen = vec![false; m + n];
        seen[ei] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(ei);
        while let Some(vertex) = queue.pop_front() {
            if vertex == target {
                break;
            }
            for &(other, cell) in &adj[vertex] {
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = Some((vertex, cell));
                    queue.push_back(other);
                }
            }
        }
        let mut path_cells = Vec::new();
        let mut cur = target;
        while cur != ei {
            let (prev, cell) = parent[cur].expect("basis tree is connected");
            path_cells.push(cell);
            cur = prev;
        }
        // cycle in alternating order starting from the entering cell; the
        // path was collected target-to-row so it already alternates
        let mut cycle = Vec::with_capacity(path_cells.len() + 1);
        cycle.push(entering);
        cycle.extend(path_cells);

        // odd positions give up flow; the lowest-index donor among the
        // minimizers leaves (Bland)
        let mut theta = f64::INFINITY;
        let mut leaving = None;
        for (pos, &cell) in cycle.iter().enumerate() {
            if pos % 2 == 1 {
                let f = flow[cell];
                if f < theta {
                    theta = f;
                    leaving = Some(cell);
                } else if f == theta && leaving.is_some_and(|l| cell < l) {
                    leaving = Some(cell);
                }
            }
        }
        let leaving = leaving.expect("cycle has donor cells");
        for (pos, &cell) in cycle.iter().enumerate() {
            if pos % 2 == 0 {
                flow[cell] += theta;
            } else {
                flow[cell] -= theta;
            }
        }
        flow[leaving] = 0.0;
        basic[leaving] = false;
        basic[entering] = true;
    }
    Err(Error::SolverStalled)
}

fn kruskal_by(g: &Graph, key: impl Fn(usize) -> f64) -> Result<Graph> {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| {
        key(a)
            .partial_cmp(&key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut dsu = Dsu::new(n);
    let mut chosen = Vec::with_capacity(n - 1);
    for e in order {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) {
            chosen.push(e);
            if chosen.len() == n - 1 {
                break;
            }
        }
    }
    if chosen.len() != n - 1 {
        let root = dsu.find(0);
        let stranded = (0..n).find(|&v| dsu.find(v) != root).unwrap_or(0);
        return Err(Error::Disconnected(stranded));
    }
    chosen.sort_unstable();
    g.subgraph_with_edges(&chosen)
}

/// Spanning tree sampled by minimum spanning tree under multiplicatively
/// perturbed weights (w_e · u_e with u_e uniform in (0,1)); deterministic
/// per seed. Node ids, labels and original weights are preserved.
pub fn random_spanning_tree(g: &Graph, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let keys: Vec<f64> = g.edges().iter().map(|e| e.w * rng.random::<f64>()).collect();
    kruskal_by(g, |e| keys[e])
}

/// Minimum spanning tree by total weight, lexicographic edge-id tie-break.
pub fn minimum_spanning_tree(g: &Graph) -> Result<Graph> {
    kruskal_by(g, |e| g.weight(e))
}

/// Tree-Wasserstein: the closed-form W₁ on a tree metric, exposed as its own
/// baseline. Equals `sobolev_distance(..., p = 1)` and requires the index
/// to have been built on a tree.
pub fn tree_wasserstein(
    tree_idx: &RootIndex,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<f64> {
    if !tree_idx.is_tree() {
        return Err(Error::NotATree);
    }
    sobolev_distance(tree_idx, mu, nu, 1.0)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra] = rb;
            true
        }
    }
}
