//! Metrics over vector data, matrix construction, and the triangular text format.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Dissimilarity, DissimilarityMatrix};

/// Dissimilarity used to compare data rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    #[serde(rename = "sqeuclidean")]
    SquaredEuclidean,
    Manhattan,
    /// The input already is a dissimilarity matrix.
    Precomputed,
}

impl Metric {
    /// Distance between two rows of equal dimension.
    ///
    /// Panics for [`Metric::Precomputed`], which has no vector form.
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Euclidean => squared_euclidean(a, b).sqrt(),
            Metric::SquaredEuclidean => squared_euclidean(a, b),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Precomputed => panic!("precomputed metric has no vector distance"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::SquaredEuclidean => "sqeuclidean",
            Metric::Manhattan => "manhattan",
            Metric::Precomputed => "precomputed",
        }
    }
}

#[inline]
fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "sqeuclidean" | "squared-euclidean" => Ok(Metric::SquaredEuclidean),
            "manhattan" => Ok(Metric::Manhattan),
            "precomputed" => Ok(Metric::Precomputed),
            other => Err(Error::InvalidArgument(format!("unknown metric '{other}'"))),
        }
    }
}

/// Dense row-major numeric data, n rows by d columns, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidArgument("data needs at least one row and one column".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(Error::Data {
                    row,
                    reason: format!("expected {dim} columns, found {}", r.len()),
                });
            }
            if let Some(bad) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::Data { row, reason: format!("non-finite value {bad}") });
            }
            values.extend(r);
        }
        Ok(Dataset { dim, values })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Rows reordered so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for &p in perm {
            values.extend_from_slice(self.row(p));
        }
        Dataset { dim: self.dim, values }
    }
}

/// Evaluates `metric` on every pair of rows and stores the result.
pub fn build_matrix(data: &Dataset, metric: Metric) -> Result<DissimilarityMatrix> {
    if metric == Metric::Precomputed {
        return Err(Error::InvalidArgument(
            "precomputed metric cannot be applied to vector data".into(),
        ));
    }
    if data.len() < 2 {
        return Err(Error::InvalidArgument("need at least two rows".into()));
    }
    DissimilarityMatrix::from_fn(data.len(), |i, j| metric.distance(data.row(i), data.row(j)))
}

/// Matrix-free dissimilarity that evaluates the metric on every lookup.
///
/// Nothing is memoized, so [`Dissimilarity::distance_evals`] reports the true
/// number of metric evaluations an algorithm caused.
#[derive(Debug)]
pub struct VectorSpace<'a> {
    data: &'a Dataset,
    metric: Metric,
    evals: AtomicU64,
}

impl<'a> VectorSpace<'a> {
    pub fn new(data: &'a Dataset, metric: Metric) -> Result<Self> {
        if metric == Metric::Precomputed {
            return Err(Error::InvalidArgument(
                "precomputed metric cannot be applied to vector data".into(),
            ));
        }
        Ok(VectorSpace { data, metric, evals: AtomicU64::new(0) })
    }

    pub fn evaluations(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }
}

impl Dissimilarity for VectorSpace<'_> {
    fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.metric.distance(self.data.row(i), self.data.row(j))
    }

    fn distance_evals(&self) -> Option<u64> {
        Some(self.evaluations())
    }
}

/// Writes the triangular text format: `n` on the first line, then row `i`
/// (for `i` in `1..n`) holding `d(i, 0) .. d(i, i-1)`.
pub fn save_matrix<W: Write>(matrix: &DissimilarityMatrix, mut out: W) -> Result<()> {
    let n = matrix.len();
    writeln!(out, "{n}")?;
    let tri = matrix.lower_triangle();
    let mut offset = 0;
    for i in 1..n {
        let row = &tri[offset..offset + i];
        offset += i;
        let mut first = true;
        for v in row {
            if !first {
                out.write_all(b" ")?;
            }
            // `{}` prints the shortest representation that round-trips.
            write!(out, "{v}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses the triangular text format written by [`save_matrix`].
pub fn load_matrix<R: BufRead>(input: R) -> Result<DissimilarityMatrix> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (line_no, header) = loop {
        match lines.next() {
            Some((no, l)) => {
                let l = l?;
                if !l.trim().is_empty() {
                    break (no, l);
                }
            }
            None => return Err(Error::Parse { line: 1, reason: "empty input".into() }),
        }
    };
    let n: usize = header.trim().parse().map_err(|_| Error::Parse {
        line: line_no,
        reason: format!("expected object count, found '{}'", header.trim()),
    })?;
    if n == 0 {
        return Err(Error::Parse { line: line_no, reason: "object count must be positive".into() });
    }
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    let mut last_line = line_no;
    for row in 1..n {
        let (no, l) = match lines.next() {
            Some((no, l)) => (no, l?),
            None => {
                return Err(Error::Parse {
                    line: last_line + 1,
                    reason: format!("missing row {row} of {}", n - 1),
                })
            }
        };
        last_line = no;
        let mut count = 0;
        for tok in l.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: no,
                reason: format!("non-numeric token '{tok}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: no, reason: format!("non-finite entry {tok}") });
            }
            if v < 0.0 {
                return Err(Error::Parse { line: no, reason: format!("negative entry {tok}") });
            }
            values.push(v);
            count += 1;
        }
        if count != row {
            return Err(Error::Parse {
                line: no,
                reason: format!("row {row} needs {row} entries, found {count}"),
            });
        }
    }
    for (no, l) in lines {
        if !l?.trim().is_empty() {
            return Err(Error::Parse { line: no, reason: "unexpected trailing data".into() });
        }
    }
    DissimilarityMatrix::from_lower_triangle(n, values, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn manhattan_1d() {
        let m = build_matrix(&ds(&[&[0.0], &[3.0], &[4.0]]), Metric::Manhattan).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(0, 2), 4.0);
        assert_eq!(m.get(1, 2), 1.0);
        assert_eq!(m.evaluations(), 3);
    }

    #[test]
    fn euclidean_345() {
        let m = build_matrix(&ds(&[&[0.0, 0.0], &[3.0, 4.0]]), Metric::Euclidean).unwrap();
        assert_eq!(m.get(0, 1), 5.0);
        let sq = build_matrix(&ds(&[&[0.0, 0.0], &[3.0, 4.0]]), Metric::SquaredEuclidean).unwrap();
        assert_eq!(sq.get(1, 0), 25.0);
    }

    #[test]
    fn eval_counter_is_pair_count() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let m = build_matrix(&Dataset::from_rows(rows).unwrap(), Metric::Euclidean).unwrap();
        assert_eq!(m.evaluations(), 4950);
    }

    #[test]
    fn bad_rows_report_index() {
        let err = Dataset::from_rows(vec![vec![1.0], vec![f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, .. }));
        let err = Dataset::from_rows(vec![vec![1.0, 2.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, .. }));
    }

    #[test]
    fn precomputed_rejects_vectors() {
        assert!(build_matrix(&ds(&[&[0.0], &[1.0]]), Metric::Precomputed).is_err());
        assert!(VectorSpace::new(&ds(&[&[0.0], &[1.0]]), Metric::Precomputed).is_err());
    }

    #[test]
    fn load_example() {
        let m = load_matrix("3\n3\n4 1\n".as_bytes()).unwrap();
        let b = build_matrix(&ds(&[&[0.0], &[3.0], &[4.0]]), Metric::Manhattan).unwrap();
        assert_eq!(m.lower_triangle(), b.lower_triangle());
        assert_eq!(m.evaluations(), 0);
    }

    #[test]
    fn load_errors_carry_line() {
        assert_eq!(
            load_matrix("2\n-1\n".as_bytes()),
            Err(Error::Parse { line: 2, reason: "negative entry -1".into() })
        );
        assert!(matches!(load_matrix("3\n1\n2\n".as_bytes()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load_matrix("3\n1\n2 x\n".as_bytes()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load_matrix("3\n1\n".as_bytes()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load_matrix("abc\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn vector_space_counts() {
        let d = ds(&[&[0.0], &[3.0], &[4.0]]);
        let v = VectorSpace::new(&d, Metric::Manhattan).unwrap();
        assert_eq!(v.get(2, 0), 4.0);
        assert_eq!(v.get(1, 1), 0.0);
        assert_eq!(v.distance_evals(), Some(1));
    }

    #[test]
    fn metric_names_roundtrip() {
        for m in [Metric::Euclidean, Metric::SquaredEuclidean, Metric::Manhattan, Metric::Precomputed] {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("cosine".parse::<Metric>().is_err());
    }
}
