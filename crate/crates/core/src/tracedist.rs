//! Insert/delete edit distance between traces.
//!
//! Substitution is not an edit, so the distance reduces to
//! `|a| + |b| - 2 * lcs(a, b)` and is computed with a two-row LCS table.

use std::collections::HashSet;
use std::io::Write;

use crate::eventlog::Trace;
use crate::exec::Execution;
use crate::{Error, Result};

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Minimum number of insertions plus deletions turning `a` into `b`.
pub fn edit_distance(a: &Trace, b: &Trace) -> u32 {
    indel_distance(a, b)
}

pub(crate) fn indel_distance<T: PartialEq>(a: &[T], b: &[T]) -> u32 {
    (a.len() + b.len() - 2 * lcs_len(a, b)) as u32
}

/// Dense symmetric matrix of edit distances over a list of distinct traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    variants: Vec<Trace>,
    entries: Vec<u32>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    pub fn variants(&self) -> &[Trace] {
        &self.variants
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.variants.len() + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.variants.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn index_of(&self, t: &Trace) -> Option<usize> {
        self.variants.iter().position(|v| v == t)
    }

    /// Sub-matrix over the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> DistanceMatrix {
        let variants = indices.iter().map(|&i| self.variants[i].clone()).collect();
        let mut entries = Vec::with_capacity(indices.len() * indices.len());
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j));
            }
        }
        DistanceMatrix { variants, entries }
    }

    /// Writes the matrix as CSV: a header of variant indices, then one row per variant.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Csv(e.to_string());
        let mut header = vec!["variant".to_string()];
        header.extend((0..self.len()).map(|i| i.to_string()));
        w.write_record(&header).map_err(err)?;
        for i in 0..self.len() {
            let mut rec = vec![i.to_string()];
            rec.extend(self.row(i).iter().map(|d| d.to_string()));
            w.write_record(&rec).map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Full pairwise distance matrix, rows computed with the default execution mode.
pub fn distance_matrix(variants: &[Trace]) -> Result<DistanceMatrix> {
    distance_matrix_with(variants, Execution::default())
}

pub fn distance_matrix_with(variants: &[Trace], exec: Execution) -> Result<DistanceMatrix> {
    if variants.is_empty() {
        return Err(Error::EmptyLog);
    }
    let mut seen = HashSet::with_capacity(variants.len());
    for (i, v) in variants.iter().enumerate() {
        if !seen.insert(v) {
            return Err(Error::DuplicateVariant(i));
        }
    }
    let n = variants.len();
    // upper triangle per row, mirrored afterwards
    let rows: Vec<Vec<u32>> = exec.map_range(n, |i| {
        (i + 1..n).map(|j| edit_distance(&variants[i], &variants[j])).collect()
    });
    let mut entries = vec![0u32; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        for (off, d) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { variants: variants.to_vec(), entries })
}
