//! Sparse probability measures supported on graph vertices.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::kahan_sum;

/// Tolerance on the total mass of a measure.
pub const MASS_TOL: f64 = 1e-9;

/// A discrete probability measure: nonnegative masses on vertices summing to
/// one (within [`MASS_TOL`]). Entries are kept sorted by node id with zero
/// masses stripped, so iteration order — and every accumulation that follows
/// from it — is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    entries: Vec<(usize, f64)>,
}

impl DiscreteMeasure {
    /// Build a measure from (node, mass) pairs. Masses on repeated nodes are
    /// summed; zero masses are dropped. Fails on negative masses or when the
    /// total deviates from 1 by more than [`MASS_TOL`].
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let collected = Self::collect(entries)?;
        let total = kahan_sum(collected.iter().map(|&(_, m)| m));
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::MassNotNormalized(total));
        }
        Ok(DiscreteMeasure { entries: collected })
    }

    /// Like [`DiscreteMeasure::new`] but rescales the masses to sum to one.
    /// Fails when the total is zero.
    pub fn normalized(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut collected = Self::collect(entries)?;
        let total = kahan_sum(collected.iter().map(|&(_, m)| m));
        if total <= 0.0 {
            return Err(Error::MassNotNormalized(total));
        }
        for e in &mut collected {
            e.1 /= total;
        }
        Ok(DiscreteMeasure { entries: collected })
    }

    fn collect(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Vec<(usize, f64)>> {
        let mut v: Vec<(usize, f64)> = entries.into_iter().collect();
        for &(node, mass) in &v {
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::NegativeMass { node, mass });
            }
        }
        v.sort_by_key(|&(n, _)| n);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
        for (n, m) in v {
            match out.last_mut() {
                Some(last) if last.0 == n => last.1 += m,
                _ => out.push((n, m)),
            }
        }
        out.retain(|&(_, m)| m > 0.0);
        Ok(out)
    }

    /// Point mass at a single node.
    pub fn dirac(node: usize) -> Self {
        DiscreteMeasure {
            entries: vec![(node, 1.0)],
        }
    }

    /// Entries sorted by node id.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(n, _)| n)
    }

    pub fn mass(&self, node: usize) -> f64 {
        self.entries
            .binary_search_by_key(&node, |&(n, _)| n)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.entries.iter().map(|&(_, m)| m))
    }

    /// Largest node id referenced, if any.
    pub fn max_node(&self) -> Option<usize> {
        self.entries.last().map(|&(n, _)| n)
    }

    /// Total-variation distance Σ|μ(v) − ν(v)| / 2; used by tests to compare
    /// reconstructions.
    pub fn total_variation(&self, other: &DiscreteMeasure) -> f64 {
        let mut i = 0;
        let mut j = 0;
        let mut acc = crate::numeric::KahanSum::new();
        while i < self.entries.len() || j < other.entries.len() {
            let (a, b) = match (self.entries.get(i), other.entries.get(j)) {
                (Some(&(na, ma)), Some(&(nb, mb))) => {
                    if na == nb {
                        i += 1;
                        j += 1;
                        (ma, mb)
                    } else if na < nb {
                        i += 1;
                        (ma, 0.0)
                    } else {
                        j += 1;
                        (0.0, mb)
                    }
                }
                (Some(&(_, ma)), None) => {
                    i += 1;
                    (ma, 0.0)
                }
                (None, Some(&(_, mb))) => {
                    j += 1;
                    (0.0, mb)
                }
                (None, None) => break,
            };
            acc.add((a - b).abs());
        }
        acc.value() / 2.0
    }

    /// Load a measure from a TSV file: one `node_label<TAB>mass` pair per
    /// line, `#` starting a comment. Labels are resolved against `graph`.
    pub fn load_tsv(path: impl AsRef<Path>, graph: &Graph, normalize: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split('\t');
            let label = parts.next().unwrap_or("").trim();
            let mass_str = parts.next().ok_or_else(|| {
                Error::parse(
                    path.display().to_string(),
                    format!("line {}: expected `label<TAB>mass`", lineno + 1),
                )
            })?;
            let node = graph.node_by_label(label).ok_or_else(|| {
                Error::parse(
                    path.display().to_string(),
                    format!("line {}: unknown node label '{label}'", lineno + 1),
                )
            })?;
            let mass: f64 = mass_str.trim().parse().map_err(|_| {
                Error::parse(
                    path.display().to_string(),
                    format!("line {}: invalid mass '{}'", lineno + 1, mass_str.trim()),
                )
            })?;
            entries.push((node, mass));
        }
        if normalize {
            Self::normalized(entries)
        } else {
            Self::new(entries)
        }
    }

    /// Write the measure in the TSV interchange format.
    pub fn save_tsv(&self, path: impl AsRef<Path>, graph: &Graph) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for &(node, mass) in &self.entries {
            out.push_str(graph.label(node));
            out.push('\t');
            out.push_str(&format!("{mass}\n"));
        }
        fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_unnormalized() {
        assert!(matches!(
            DiscreteMeasure::new([(0, -0.1), (1, 1.1)]),
            Err(Error::NegativeMass { .. })
        ));
        assert!(matches!(
            DiscreteMeasure::new([(0, 0.4)]),
            Err(Error::MassNotNormalized(_))
        ));
    }

    #[test]
    fn duplicates_are_summed_and_zeros_stripped() {
        let m = DiscreteMeasure::new([(2, 0.25), (2, 0.25), (0, 0.5), (1, 0.0)]).unwrap();
        assert_eq!(m.entries(), &[(0, 0.5), (2, 0.5)]);
        assert_eq!(m.mass(1), 0.0);
    }

    #[test]
    fn normalization_rescales() {
        let m = DiscreteMeasure::normalized([(0, 3.0), (1, 1.0)]).unwrap();
        assert!((m.mass(0) - 0.75).abs() < 1e-15);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn total_variation_basics() {
        let a = DiscreteMeasure::dirac(0);
        let b = DiscreteMeasure::dirac(1);
        assert_eq!(a.total_variation(&b), 1.0);
        assert_eq!(a.total_variation(&a), 0.0);
    }

    #[test]
    fn tsv_roundtrip_and_errors() {
        let g = Graph::from_edges(3, &[(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.tsv");
        fs::write(&path, "# comment\n0\t0.25\n2\t0.75\n").unwrap();
        let m = DiscreteMeasure::load_tsv(&path, &g, false).unwrap();
        assert_eq!(m.entries(), &[(0, 0.25), (2, 0.75)]);

        let out = dir.path().join("m2.tsv");
        m.save_tsv(&out, &g).unwrap();
        let back = DiscreteMeasure::load_tsv(&out, &g, false).unwrap();
        assert_eq!(m, back);

        fs::write(&path, "0\t0.25\nbogus\t0.75\n").unwrap();
        let err = DiscreteMeasure::load_tsv(&path, &g, false).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        fs::write(&path, "0\tnot_a_number\n").unwrap();
        let err = DiscreteMeasure::load_tsv(&path, &g, false).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}
