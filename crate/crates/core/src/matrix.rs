//! Pairwise dissimilarity storage and access.
//!
//! Every algorithm in this crate reads distances through the [`Dissimilarity`]
//! trait, so the same code runs over a materialized [`DissimilarityMatrix`],
//! over vectors evaluated on demand ([`crate::dissimilarity::VectorSpace`]),
//! or through a [`Counted`] wrapper that tallies lookups for benchmarks.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Read access to a symmetric dissimilarity over `len()` objects.
pub trait Dissimilarity {
    /// Number of objects.
    fn len(&self) -> usize;

    /// d(i, j). Symmetric, zero on the diagonal, never negative.
    fn get(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lookups performed so far, if this accessor counts them.
    fn lookups(&self) -> Option<u64> {
        None
    }

    /// Primitive distance evaluations performed so far, if this accessor computes on demand.
    fn distance_evals(&self) -> Option<u64> {
        None
    }
}

impl<D: Dissimilarity + ?Sized> Dissimilarity for &D {
    fn len(&self) -> usize {
        (**self).len()
    }
    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        (**self).get(i, j)
    }
    fn lookups(&self) -> Option<u64> {
        (**self).lookups()
    }
    fn distance_evals(&self) -> Option<u64> {
        (**self).distance_evals()
    }
}

/// Offset of the strictly-lower-triangular entry (row, col) with row > col.
#[inline]
fn tri_index(row: usize, col: usize) -> usize {
    debug_assert!(row > col);
    row * (row - 1) / 2 + col
}

/// Symmetric dissimilarity matrix stored as its strict lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    evaluations: u64,
}

impl DissimilarityMatrix {
    /// Wraps an already filled lower triangle, row-major: (1,0), (2,0), (2,1), ...
    pub fn from_lower_triangle(n: usize, values: Vec<f64>, evaluations: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("matrix needs at least one object".into()));
        }
        if values.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "expected {} lower-triangular entries for n = {}, got {}",
                n * (n - 1) / 2,
                n,
                values.len()
            )));
        }
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "entry {idx} is {v}; dissimilarities must be finite and nonnegative"
                )));
            }
        }
        Ok(DissimilarityMatrix { n, values, evaluations })
    }

    /// Builds the matrix by evaluating `dist` on every unordered pair.
    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..n {
            for j in 0..i {
                values.push(dist(i, j));
            }
        }
        let evals = values.len() as u64;
        Self::from_lower_triangle(n, values, evals)
    }

    /// Copies the submatrix induced by `indices` out of any dissimilarity.
    pub fn from_subset<D: Dissimilarity>(source: &D, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= source.len() {
                return Err(Error::IndexOutOfRange { index: i, len: source.len() });
            }
        }
        let mut m = Self::from_fn(indices.len(), |a, b| source.get(indices[a], indices[b]))?;
        m.evaluations = 0;
        Ok(m)
    }

    /// Number of primitive dissimilarity evaluations spent building this matrix.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// The strict lower triangle, row-major.
    pub fn lower_triangle(&self) -> &[f64] {
        &self.values
    }

    /// Checked access.
    pub fn try_get(&self, i: usize, j: usize) -> Result<f64> {
        for idx in [i, j] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, len: self.n });
            }
        }
        Ok(self.get(i, j))
    }
}

impl Dissimilarity for DissimilarityMatrix {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => self.values[tri_index(i, j)],
            std::cmp::Ordering::Less => self.values[tri_index(j, i)],
        }
    }
}

/// Counts every lookup made through it.
#[derive(Debug)]
pub struct Counted<D> {
    inner: D,
    count: AtomicU64,
}

impl<D: Dissimilarity> Counted<D> {
    pub fn new(inner: D) -> Self {
        Counted { inner, count: AtomicU64::new(0) }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }
}

impl<D: Dissimilarity> Dissimilarity for Counted<D> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.get(i, j)
    }

    fn lookups(&self) -> Option<u64> {
        Some(self.count())
    }

    fn distance_evals(&self) -> Option<u64> {
        self.inner.distance_evals()
    }
}
