//! Python bindings: dissimilarity matrices, k-medoids runs and the mixture generator.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use fastpam::synth::{gaussian_mixture as mixture, MixtureSpec};
use fastpam::{Algorithm, Dataset, Dissimilarity, DissimilarityMatrix, InitMethod, RunConfig};

fn py_err(e: fastpam::Error) -> PyErr {
    match e {
        fastpam::Error::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        fastpam::Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = fastpam::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

/// Symmetric dissimilarity matrix stored as a lower triangle.
#[pyclass(module = "fastpam", name = "Matrix", frozen)]
struct PyMatrix {
    inner: DissimilarityMatrix,
}

#[pymethods]
impl PyMatrix {
    /// Pairwise distances between the rows of `data` (a sequence of equal-length rows).
    #[staticmethod]
    #[pyo3(signature = (data, metric = "euclidean"))]
    fn from_vectors(data: Vec<Vec<f64>>, metric: &str) -> PyResult<Self> {
        let dataset = Dataset::from_rows(data).map_err(py_err)?;
        let inner = fastpam::build_matrix(&dataset, parse(metric)?).map_err(py_err)?;
        Ok(PyMatrix { inner })
    }

    /// Wraps a full square matrix. It must be symmetric with a zero diagonal.
    #[staticmethod]
    fn from_square(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(PyValueError::new_err(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(PyValueError::new_err(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let inner = DissimilarityMatrix::from_fn(n, |i, j| rows[i][j]).map_err(py_err)?;
        Ok(PyMatrix { inner })
    }

    /// Reads the triangular text format.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let f = File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let inner = fastpam::load_matrix(BufReader::new(f)).map_err(py_err)?;
        Ok(PyMatrix { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let f = File::create(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let mut w = BufWriter::new(f);
        fastpam::save_matrix(&self.inner, &mut w).map_err(py_err)?;
        w.flush().map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        self.inner.try_get(i, j).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Matrix(n={})", self.inner.len())
    }
}

/// Counters gathered during one run.
#[pyclass(module = "fastpam", name = "RunStats", frozen, get_all)]
struct PyRunStats {
    iterations: usize,
    swaps_executed: usize,
    candidate_evaluations: u64,
    inner_work: u64,
    lookups: u64,
    distance_evals: u64,
    truncated: bool,
}

/// Outcome of [`cluster`].
#[pyclass(module = "fastpam", name = "Clustering", frozen, get_all)]
struct PyClustering {
    medoids: Vec<usize>,
    /// Slot in `medoids` of each object's nearest medoid.
    assignment: Vec<usize>,
    td: f64,
    initial_td: f64,
    used_full_data: bool,
    stats: Py<PyRunStats>,
    seconds: f64,
}

#[pymethods]
impl PyClustering {
    /// Object index of each object's medoid.
    fn labels(&self) -> Vec<usize> {
        self.assignment.iter().map(|&s| self.medoids[s]).collect()
    }

    fn __repr__(&self) -> String {
        format!("Clustering(medoids={:?}, td={})", self.medoids, self.td)
    }
}

/// Runs one k-medoids algorithm on a matrix.
#[pyfunction]
#[pyo3(signature = (matrix, k, engine = "fastpam2", init = None, seed = 0, tau = 0.0, max_iter = 0,
                    sample_size = None, restarts = None, attempts = None, numlocal = None))]
#[allow(clippy::too_many_arguments)]
fn cluster(
    py: Python<'_>,
    matrix: &PyMatrix,
    k: usize,
    engine: &str,
    init: Option<&str>,
    seed: u64,
    tau: f64,
    max_iter: usize,
    sample_size: Option<usize>,
    restarts: Option<usize>,
    attempts: Option<usize>,
    numlocal: Option<usize>,
) -> PyResult<PyClustering> {
    let config = RunConfig {
        init: init.map(parse::<InitMethod>).transpose()?,
        tau,
        max_iter,
        sample_size,
        restarts,
        attempts,
        numlocal,
        ..RunConfig::new(parse::<Algorithm>(engine)?, seed)
    };
    let m = &matrix.inner;
    let out = py.detach(|| fastpam::run(m, k, &config)).map_err(py_err)?;
    let s = &out.stats;
    let stats = PyRunStats {
        iterations: s.iterations,
        swaps_executed: s.swaps_executed,
        candidate_evaluations: s.candidate_evaluations,
        inner_work: s.inner_work,
        lookups: s.lookups,
        distance_evals: s.distance_evals,
        truncated: s.truncated,
    };
    Ok(PyClustering {
        medoids: out.medoids,
        assignment: out.assignment,
        td: out.td,
        initial_td: out.initial_td,
        used_full_data: out.used_full_data,
        stats: Py::new(py, stats)?,
        seconds: out.total_ms / 1e3,
    })
}

/// Total deviation: sum over objects of the distance to the nearest medoid.
#[pyfunction]
fn compute_td(matrix: &PyMatrix, medoids: Vec<usize>) -> PyResult<f64> {
    fastpam::compute_td(&matrix.inner, &medoids).map_err(py_err)
}

/// Seeded balanced Gaussian mixture. Returns `(rows, labels)`.
#[pyfunction]
#[pyo3(signature = (n, clusters = 10, dim = 2, spread = 0.5, seed = 0, box_size = 10.0))]
fn gaussian_mixture(
    n: usize,
    clusters: usize,
    dim: usize,
    spread: f64,
    seed: u64,
    box_size: f64,
) -> PyResult<(Vec<Vec<f64>>, Vec<usize>)> {
    let spec = MixtureSpec { clusters, dim, spread, n, seed, box_size };
    let m = mixture(&spec).map_err(py_err)?;
    Ok((m.data.rows().map(<[f64]>::to_vec).collect(), m.labels))
}

#[pymodule]
#[pyo3(name = "fastpam")]
fn fastpam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyRunStats>()?;
    m.add_class::<PyClustering>()?;
    m.add_function(wrap_pyfunction!(cluster, m)?)?;
    m.add_function(wrap_pyfunction!(compute_td, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_mixture, m)?)?;
    m.add("RNG", fastpam::rng::RNG_NAME)?;
    m.add("ENGINES", Algorithm::ALL.map(|a| a.name()).to_vec())?;
    Ok(())
}
