//! Graph-metric construction from raw point clouds: farthest-point
//! clustering to pick node sites, random edge sampling with Euclidean
//! weights, connectivity stitching, and projection of point masses onto
//! cluster centroids.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::measure::DiscreteMeasure;

/// A nonempty set of points with uniform dimension and finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointCloud);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidPointCloud("zero-dimensional points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidPointCloud(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidPointCloud(format!(
                    "point {i} has non-finite coordinates"
                )));
            }
        }
        Ok(PointCloud { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Load from TSV: one whitespace-free, tab-separated coordinate vector
    /// per line; `#` starts a comment.
    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let coords: std::result::Result<Vec<f64>, _> =
                content.split('\t').map(|t| t.trim().parse::<f64>()).collect();
            let coords = coords.map_err(|_| {
                Error::parse(
                    path.display().to_string(),
                    format!("line {}: invalid coordinate vector", lineno + 1),
                )
            })?;
            points.push(coords);
        }
        PointCloud::new(points).map_err(|e| match e {
            Error::EmptyPointCloud => Error::parse(path.display().to_string(), "no points"),
            Error::InvalidPointCloud(msg) => Error::parse(path.display().to_string(), msg),
            other => other,
        })
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Output of [`farthest_point_clustering`].
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centroids: PointCloud,
    /// Per input point, the index of its nearest centroid (ties to the
    /// lowest index).
    pub assignment: Vec<usize>,
    /// Coincident input points merged before clustering; they would
    /// otherwise yield zero-weight edges downstream.
    pub merged_duplicates: usize,
}

/// Greedy k-center (Gonzalez): the first centroid is a seeded uniform draw,
/// each next one the point farthest from the chosen set, stopping at `m`
/// centroids or when every distinct point is one.
pub fn farthest_point_clustering(pc: &PointCloud, m: usize, seed: u64) -> Result<Clustering> {
    if m == 0 {
        return Err(Error::InvalidBuildSpec("cluster budget must be >= 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    // merge exact duplicates first
    let mut reps: Vec<usize> = Vec::new();
    let mut key_index: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, p) in pc.points().iter().enumerate() {
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        key_index.entry(key).or_insert_with(|| {
            reps.push(i);
            reps.len() - 1
        });
    }
    let merged_duplicates = pc.len() - reps.len();

    let k = m.min(reps.len());
    let first = rng.random_range(0..reps.len());
    let mut chosen: Vec<usize> = vec![first];
    let mut min_dist: Vec<f64> = reps
        .iter()
        .map(|&r| euclid(pc.point(r), pc.point(reps[first])))
        .collect();
    while chosen.len() < k {
        let mut far = 0;
        let mut far_d = -1.0;
        for (pos, &d) in min_dist.iter().enumerate() {
            if d > far_d {
                far_d = d;
                far = pos;
            }
        }
        chosen.push(far);
        for (pos, &r) in reps.iter().enumerate() {
            let d = euclid(pc.point(r), pc.point(reps[far]));
            if d < min_dist[pos] {
                min_dist[pos] = d;
            }
        }
    }

    let centroids = PointCloud::new(
        chosen
            .iter()
            .map(|&pos| pc.point(reps[pos]).to_vec())
            .collect(),
    )?;
    let assignment = pc
        .points()
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, site) in centroids.points().iter().enumerate() {
                let d = euclid(p, site);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect();

    Ok(Clustering {
        centroids,
        assignment,
        merged_duplicates,
    })
}

/// Edge-budget rule for the sampled graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRule {
    /// ⌈M·ln M⌉ sampled edges.
    Log,
    /// ⌈M^{3/2}⌉ sampled edges.
    Sqrt,
}

/// Parameters of the random graph construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildSpec {
    pub m: usize,
    pub edge_rule: EdgeRule,
    pub seed: u64,
}

impl BuildSpec {
    pub fn new(m: usize, edge_rule: EdgeRule, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidBuildSpec(format!(
                "cluster budget must be >= 2, got {m}"
            )));
        }
        Ok(BuildSpec { m, edge_rule, seed })
    }

    fn budget(&self, n: usize) -> usize {
        let nf = n as f64;
        let raw = match self.edge_rule {
            EdgeRule::Log => nf * nf.ln(),
            EdgeRule::Sqrt => nf * nf.sqrt(),
        };
        raw.ceil() as usize
    }
}

/// Sample a connected graph on the centroids: `min(budget, C(n,2))` distinct
/// unordered pairs drawn uniformly without replacement with Euclidean
/// weights, then one random edge between each successive pair of connected
/// components under a random component order. Deterministic per seed.
/// Coincident centroid pairs are excluded (they would carry weight zero).
pub fn build_random_graph(centroids: &PointCloud, spec: &BuildSpec) -> Result<Graph> {
    let n = centroids.len();
    if n < 2 {
        return Err(Error::InvalidBuildSpec(format!(
            "need at least 2 centroids, got {n}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let total_pairs = n * (n - 1) / 2;
    let budget = spec.budget(n).min(total_pairs);

    let has_duplicates = {
        let mut keys = HashSet::new();
        centroids
            .points()
            .iter()
            .any(|p| !keys.insert(p.iter().map(|x| x.to_bits()).collect::<Vec<u64>>()))
    };

    let mut pairs: Vec<(usize, usize)>;
    if has_duplicates || budget * 2 >= total_pairs {
        // enumerate valid pairs and take a seeded partial shuffle
        pairs = Vec::with_capacity(total_pairs);
        for i in 0..n {
            for j in i + 1..n {
                if euclid(centroids.point(i), centroids.point(j)) > 0.0 {
                    pairs.push((i, j));
                }
            }
        }
        let take = budget.min(pairs.len());
        for i in 0..take {
            let j = rng.random_range(i..pairs.len());
            pairs.swap(i, j);
        }
        pairs.truncate(take);
    } else {
        // rejection sampling: uniform over unordered pairs, skip repeats
        let mut chosen = HashSet::with_capacity(budget * 2);
        pairs = Vec::with_capacity(budget);
        while pairs.len() < budget {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if chosen.insert(key) {
                pairs.push(key);
            }
        }
    }
    pairs.sort_unstable();

    let mut edges: Vec<(usize, usize, f64)> = pairs
        .iter()
        .map(|&(i, j)| (i, j, euclid(centroids.point(i), centroids.point(j))))
        .collect();

    // stitch connected components with (n_c - 1) random bridges
    let mut comp_id = vec![usize::MAX; n];
    {
        let mut adj = vec![Vec::new(); n];
        for &(i, j, _) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut next = 0;
        for start in 0..n {
            if comp_id[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp_id[start] = next;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if comp_id[v] == usize::MAX {
                        comp_id[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
    }
    let n_comps = comp_id.iter().max().map(|&c| c + 1).unwrap_or(0);
    if n_comps > 1 {
        let mut components: Vec<Vec<usize>> = vec![Vec::new(); n_comps];
        for (v, &c) in comp_id.iter().enumerate() {
            components[c].push(v);
        }
        // random merge order
        for i in (1..components.len()).rev() {
            let j = rng.random_range(0..=i);
            components.swap(i, j);
        }
        let mut merged: Vec<usize> = components[0].clone();
        for comp in components.iter().skip(1) {
            let mut attempts = 0;
            loop {
                let a = merged[rng.random_range(0..merged.len())];
                let b = comp[rng.random_range(0..comp.len())];
                let w = euclid(centroids.point(a), centroids.point(b));
                if w > 0.0 {
                    edges.push((a.min(b), a.max(b), w));
                    break;
                }
                attempts += 1;
                if attempts > 64 {
                    return Err(Error::InvalidPointCloud(
                        "cannot stitch components of coincident centroids".into(),
                    ));
                }
            }
            merged.extend_from_slice(comp);
        }
    }

    let labels = (0..n).map(|i| i.to_string()).collect();
    Graph::new(labels, Some(centroids.points().to_vec()), edges)
}

/// Project raw (point index, mass) pairs onto centroids through a clustering
/// assignment: masses of points mapped to the same centroid are summed.
pub fn project_measure(assignment: &[usize], raw: &[(usize, f64)]) -> Result<DiscreteMeasure> {
    let mut entries = Vec::with_capacity(raw.len());
    for &(point, mass) in raw {
        let centroid = *assignment
            .get(point)
            .ok_or(Error::UnassignedPoint(point))?;
        entries.push((centroid, mass));
    }
    DiscreteMeasure::new(entries)
}
