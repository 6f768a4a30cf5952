//! Positive-definite kernels built on the transport distance, Gram-matrix
//! computation with deterministic parallel fill, the quantile-based
//! bandwidth protocol, and eigenvalue checks.
//!
//! For 1 ≤ p ≤ 2 both `exp(−t·S_p)` and `exp(−t·S_p^p)` are positive
//! definite; orders outside [1, 2] are refused here even though the distance
//! itself allows them.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::root_index::RootIndex;
use crate::sobolev::{check_order, feature_embed, lp_distance_pow};

/// Which kernel to evaluate: on the distance or on its p-th power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// k(μ, ν) = exp(−t · S_p(μ, ν))
    Sp,
    /// k(μ, ν) = exp(−t · S_p(μ, ν)^p)
    SpPowP,
}

/// Kernel family, order and bandwidth. Orders are restricted to [1, 2],
/// the range with a positive-definiteness guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub p: f64,
    pub t: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, p: f64, t: f64) -> Result<Self> {
        check_order(p)?;
        if p > 2.0 {
            return Err(Error::KernelOrderOutOfRange(p));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidBandwidth(t));
        }
        Ok(KernelSpec { family, p, t })
    }
}

/// Kernel entries are clamped below at this value to keep them positive and
/// out of the denormal range.
const GRAM_CLAMP: f64 = 1e-300;

/// Dense symmetric kernel matrix with unit diagonal and entries in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    labels: Vec<String>,
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major backing storage.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                self.n,
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Add a constant to the diagonal, the usual regularization for
    /// indefinite kernel matrices; the magnitude is the caller's choice.
    pub fn add_diagonal_shift(&mut self, shift: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += shift;
        }
    }

    /// CSV export: a header row with the measure labels, then one row of
    /// entries per measure.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.labels.join(","))?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Binary export: magic `SGRM`, little-endian u32 n, then n² row-major
    /// little-endian f64 entries.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(b"SGRM")?;
        out.write_all(&(self.n as u32).to_le_bytes())?;
        for &x in &self.data {
            out.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input
            .read_exact(&mut magic)
            .map_err(|e| Error::io("<gram>", e))?;
        if &magic != b"SGRM" {
            return Err(Error::parse("<gram>", "bad magic bytes"));
        }
        let mut nb = [0u8; 4];
        input.read_exact(&mut nb).map_err(|e| Error::io("<gram>", e))?;
        let n = u32::from_le_bytes(nb) as usize;
        let mut data = vec![0.0f64; n * n];
        let mut buf = [0u8; 8];
        for x in &mut data {
            input.read_exact(&mut buf).map_err(|e| Error::io("<gram>", e))?;
            *x = f64::from_le_bytes(buf);
        }
        Ok(GramMatrix {
            labels: (0..n).map(|i| i.to_string()).collect(),
            n,
            data,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>, binary: bool) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let out = BufWriter::new(file);
        if binary {
            self.write_binary(out)
        } else {
            self.write_csv(out)
        }
        .map_err(|e| Error::io(path.display().to_string(), e))
    }
}

fn gram_entry(emb_i: &[f64], emb_j: &[f64], spec: &KernelSpec) -> f64 {
    let pow_sum = lp_distance_pow(emb_i, emb_j, spec.p).expect("embeddings share length");
    let exponent_arg = match spec.family {
        KernelFamily::Sp => {
            if spec.p == 1.0 {
                pow_sum
            } else if spec.p == 2.0 {
                pow_sum.sqrt()
            } else {
                pow_sum.powf(1.0 / spec.p)
            }
        }
        KernelFamily::SpPowP => pow_sum,
    };
    (-spec.t * exponent_arg).exp().max(GRAM_CLAMP)
}

/// Kernel Gram matrix over a measure set: each measure is embedded once,
/// then the upper triangle is filled pairwise (in parallel over rows when a
/// rayon pool is available) and mirrored. Entries depend only on the
/// embedding table, so the result is bit-identical for any thread count.
pub fn gram_matrix(
    idx: &RootIndex,
    measures: &[DiscreteMeasure],
    spec: &KernelSpec,
) -> Result<GramMatrix> {
    KernelSpec::new(spec.family, spec.p, spec.t)?;
    if measures.is_empty() {
        return Err(Error::InvalidInput("no measures".into()));
    }
    let embeddings: Vec<Vec<f64>> = measures
        .iter()
        .map(|m| feature_embed(idx, m, spec.p))
        .collect::<Result<_>>()?;
    let n = measures.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| gram_entry(&embeddings[i], &embeddings[j], spec))
                .collect()
        })
        .collect();
    let mut data = vec![0.0f64; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for (off, &val) in rows[i].iter().enumerate() {
            let j = i + 1 + off;
            data[i * n + j] = val;
            data[j * n + i] = val;
        }
    }
    Ok(GramMatrix {
        labels: (0..n).map(|i| i.to_string()).collect(),
        n,
        data,
    })
}

/// Same as [`gram_matrix`] but inside a dedicated rayon pool of `threads`
/// workers (0 means the default pool).
pub fn gram_matrix_with_threads(
    idx: &RootIndex,
    measures: &[DiscreteMeasure],
    spec: &KernelSpec,
    threads: usize,
) -> Result<GramMatrix> {
    if threads == 0 {
        return gram_matrix(idx, measures, spec);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| gram_matrix(idx, measures, spec))
}

/// Bandwidth grid from a sample of training distances: 1/t is drawn from
/// {q_s, 2q_s, 5q_s} for s = 10%, 20%, …, 90%, where q_s is the lower
/// nearest-rank quantile. Zero quantiles are skipped; the result is
/// deduplicated and sorted descending (at most 27 values).
pub fn bandwidth_candidates(train_distances: &[f64]) -> Result<Vec<f64>> {
    if train_distances.is_empty() {
        return Err(Error::InvalidInput("empty distance sample".into()));
    }
    if train_distances.iter().any(|&d| !d.is_finite() || d < 0.0) {
        return Err(Error::InvalidInput(
            "distances must be nonnegative and finite".into(),
        ));
    }
    let mut sorted = train_distances.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if *sorted.last().unwrap() == 0.0 {
        return Err(Error::AllDistancesZero);
    }
    let n = sorted.len();
    let mut out = Vec::with_capacity(27);
    for s in (10..=90).step_by(10) {
        let rank = (s * n).div_ceil(100).max(1);
        let q = sorted[rank - 1];
        if q == 0.0 {
            continue;
        }
        for m in [1.0, 2.0, 5.0] {
            out.push(1.0 / (m * q));
        }
    }
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out.dedup();
    Ok(out)
}

/// All eigenvalues of a symmetric Gram matrix (ascending). Rejects matrices
/// asymmetric beyond 1e-12.
pub fn symmetric_eigenvalues(m: &GramMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    let mut max_dev = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            max_dev = max_dev.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }
    if max_dev > 1e-12 {
        return Err(Error::AsymmetricMatrix(max_dev));
    }
    let mat = nalgebra::DMatrix::from_row_slice(n, n, m.data());
    let mut eig: Vec<f64> = mat.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Smallest eigenvalue of a symmetric Gram matrix.
pub fn min_eigenvalue(m: &GramMatrix) -> Result<f64> {
    Ok(symmetric_eigenvalues(m)?[0])
}
