//! Initial medoid selection: BUILD, LAB, k-means++, uniform random and Park-Jun.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::Dissimilarity;
use crate::rng::{self, Rng};
use crate::state::MedoidState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMethod {
    Build,
    Lab,
    #[serde(rename = "kmeanspp")]
    KMeansPlusPlus,
    Random,
    #[serde(rename = "parkjun")]
    ParkJun,
}

impl InitMethod {
    pub fn name(self) -> &'static str {
        match self {
            InitMethod::Build => "build",
            InitMethod::Lab => "lab",
            InitMethod::KMeansPlusPlus => "kmeanspp",
            InitMethod::Random => "random",
            InitMethod::ParkJun => "parkjun",
        }
    }
}

impl fmt::Display for InitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "build" => Ok(InitMethod::Build),
            "lab" => Ok(InitMethod::Lab),
            "kmeanspp" | "kmeans++" => Ok(InitMethod::KMeansPlusPlus),
            "random" => Ok(InitMethod::Random),
            "parkjun" => Ok(InitMethod::ParkJun),
            other => Err(Error::InvalidArgument(format!("unknown init method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    pub method: InitMethod,
    pub seed: u64,
    /// LAB subsample size; `None` means `10 + ceil(sqrt(n))`.
    pub lab_sample_size: Option<usize>,
}

impl InitConfig {
    pub fn new(method: InitMethod, seed: u64) -> Self {
        InitConfig { method, seed, lab_sample_size: None }
    }
}

/// Default LAB subsample size for `n` objects.
pub fn lab_default_sample_size(n: usize) -> usize {
    10 + (n as f64).sqrt().ceil() as usize
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return invalid(format!("k must satisfy 1 <= k < n, got k = {k}, n = {n}"));
    }
    Ok(())
}

/// Runs the configured initializer.
pub fn initialize<D: Dissimilarity>(matrix: &D, k: usize, config: &InitConfig) -> Result<MedoidState> {
    match config.method {
        InitMethod::Build => build_init(matrix, k),
        InitMethod::Lab => lab_init(matrix, k, config),
        InitMethod::KMeansPlusPlus => kmeanspp_init(matrix, k, config.seed),
        InitMethod::Random => random_init(matrix, k, config.seed),
        InitMethod::ParkJun => parkjun_init(matrix, k),
    }
}

/// Lowers `dnear` to the distance from each object to `medoid`.
fn tighten<D: Dissimilarity>(matrix: &D, dnear: &mut [f64], medoid: usize) {
    for (o, dn) in dnear.iter_mut().enumerate() {
        let d = matrix.get(o, medoid);
        if d < *dn {
            *dn = d;
        }
    }
    dnear[medoid] = 0.0;
}

fn finish(n: usize, medoids: Vec<usize>, dnear: &[f64]) -> Result<MedoidState> {
    let td = dnear.iter().sum();
    MedoidState::with_td(n, medoids, td)
}

/// Greedy PAM BUILD in O(n²k).
pub fn build_init<D: Dissimilarity>(matrix: &D, k: usize) -> Result<MedoidState> {
    let n = matrix.len();
    check_k(n, k)?;

    let mut first = (f64::INFINITY, 0);
    for j in 0..n {
        let mut sum = 0.0;
        for o in (0..n).filter(|&o| o != j) {
            sum += matrix.get(o, j);
        }
        if sum < first.0 {
            first = (sum, j);
        }
    }
    let mut medoids = vec![first.1];
    let mut is_medoid = vec![false; n];
    is_medoid[first.1] = true;
    let mut dnear = vec![f64::INFINITY; n];
    tighten(matrix, &mut dnear, first.1);

    for _ in 1..k {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (0..n).filter(|&j| !is_medoid[j]) {
            let mut delta = 0.0;
            for o in (0..n).filter(|&o| !is_medoid[o]) {
                let gain = matrix.get(o, j) - dnear[o];
                if gain < 0.0 {
                    delta += gain;
                }
            }
            if delta < best.0 {
                best = (delta, j);
            }
        }
        medoids.push(best.1);
        is_medoid[best.1] = true;
        tighten(matrix, &mut dnear, best.1);
    }
    finish(n, medoids, &dnear)
}

/// Draws `size` distinct entries of `pool` (all of it if smaller), sorted ascending.
fn subsample(rng: &mut Rng, pool: &[usize], size: usize) -> Vec<usize> {
    let mut s: Vec<usize> = if size >= pool.len() {
        pool.to_vec()
    } else {
        index::sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect()
    };
    s.sort_unstable();
    s
}

/// Linear approximate BUILD: each greedy step only looks at a fresh uniform
/// subsample of the remaining non-medoids, and scores candidates on that
/// subsample alone. O(nk) lookups for the default sample size.
pub fn lab_init<D: Dissimilarity>(matrix: &D, k: usize, config: &InitConfig) -> Result<MedoidState> {
    let n = matrix.len();
    check_k(n, k)?;
    let size = config.lab_sample_size.unwrap_or_else(|| lab_default_sample_size(n));
    if size == 0 {
        return invalid("LAB sample size must be positive");
    }
    let mut rng = rng::seeded(config.seed);

    let everyone: Vec<usize> = (0..n).collect();
    let sample = subsample(&mut rng, &everyone, size);
    let mut first = (f64::INFINITY, sample[0]);
    for &j in &sample {
        let mut sum = 0.0;
        for &o in sample.iter().filter(|&&o| o != j) {
            sum += matrix.get(o, j);
        }
        if sum < first.0 {
            first = (sum, j);
        }
    }

    let mut medoids = vec![first.1];
    let mut is_medoid = vec![false; n];
    is_medoid[first.1] = true;
    let mut dnear = vec![f64::INFINITY; n];
    tighten(matrix, &mut dnear, first.1);

    for _ in 1..k {
        let pool: Vec<usize> = (0..n).filter(|&o| !is_medoid[o]).collect();
        let sample = subsample(&mut rng, &pool, size);
        let mut best = (f64::INFINITY, sample[0]);
        for &j in &sample {
            let mut delta = 0.0;
            for &o in &sample {
                let gain = matrix.get(o, j) - dnear[o];
                if gain < 0.0 {
                    delta += gain;
                }
            }
            if delta < best.0 {
                best = (delta, j);
            }
        }
        medoids.push(best.1);
        is_medoid[best.1] = true;
        tighten(matrix, &mut dnear, best.1);
    }
    finish(n, medoids, &dnear)
}

/// k-means++ style seeding: the first medoid is uniform, each further one is
/// drawn with probability proportional to its distance to the nearest chosen
/// medoid. Falls back to a uniform non-medoid when all those distances are 0.
pub fn kmeanspp_init<D: Dissimilarity>(matrix: &D, k: usize, seed: u64) -> Result<MedoidState> {
    let n = matrix.len();
    check_k(n, k)?;
    let mut rng = rng::seeded(seed);

    let first = rng.random_range(0..n);
    let mut medoids = vec![first];
    let mut is_medoid = vec![false; n];
    is_medoid[first] = true;
    let mut dnear = vec![f64::INFINITY; n];
    tighten(matrix, &mut dnear, first);

    for _ in 1..k {
        let total: f64 = (0..n).filter(|&o| !is_medoid[o]).map(|o| dnear[o]).sum();
        let next = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = None;
            for o in (0..n).filter(|&o| !is_medoid[o] && dnear[o] > 0.0) {
                pick = Some(o);
                r -= dnear[o];
                if r < 0.0 {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            let pool: Vec<usize> = (0..n).filter(|&o| !is_medoid[o]).collect();
            pool[rng.random_range(0..pool.len())]
        };
        medoids.push(next);
        is_medoid[next] = true;
        tighten(matrix, &mut dnear, next);
    }
    finish(n, medoids, &dnear)
}

/// k distinct medoids drawn uniformly.
pub fn random_init<D: Dissimilarity>(matrix: &D, k: usize, seed: u64) -> Result<MedoidState> {
    let n = matrix.len();
    check_k(n, k)?;
    let medoids = random_medoids(n, k, &mut rng::seeded(seed));
    MedoidState::new(matrix, medoids)
}

pub(crate) fn random_medoids(n: usize, k: usize, rng: &mut Rng) -> Vec<usize> {
    index::sample(rng, n, k).into_vec()
}

/// Park-Jun centrality score: for each object j,
/// `v_j = sum_i d(i, j) / sum_l d(i, l)`; the k smallest scores become medoids.
pub fn parkjun_scores<D: Dissimilarity>(matrix: &D) -> Vec<f64> {
    let n = matrix.len();
    let row_sums: Vec<f64> = (0..n).map(|i| (0..n).map(|l| matrix.get(i, l)).sum()).collect();
    let mut v = vec![0.0; n];
    for (i, &s) in row_sums.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        for (j, vj) in v.iter_mut().enumerate() {
            *vj += matrix.get(i, j) / s;
        }
    }
    v
}

pub fn parkjun_init<D: Dissimilarity>(matrix: &D, k: usize) -> Result<MedoidState> {
    let n = matrix.len();
    check_k(n, k)?;
    let v = parkjun_scores(matrix);
    // Rank on scores rounded to 1e-12 of the largest score so that objects whose
    // scores differ only by summation order tie and fall back to index order.
    let scale = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let key: Vec<f64> = if scale > 0.0 { v.iter().map(|x| (x / scale * 1e12).round()).collect() } else { v };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key[a].total_cmp(&key[b]).then(a.cmp(&b)));
    order.truncate(k);
    MedoidState::new(matrix, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DissimilarityMatrix;
    use crate::state::compute_td;

    fn line(points: &[f64]) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap()
    }

    const SIX: [f64; 6] = [0.0, 1.0, 2.0, 6.0, 7.0, 8.0];

    #[test]
    fn build_examples() {
        let m = line(&SIX);
        let s1 = build_init(&m, 1).unwrap();
        assert_eq!(s1.medoids(), &[2]);
        assert_eq!(s1.td(), 18.0);
        let s2 = build_init(&m, 2).unwrap();
        assert_eq!(s2.medoids(), &[2, 4]);
        assert_eq!(s2.td(), 5.0);
        let s5 = build_init(&m, 5).unwrap();
        assert_eq!(s5.td(), compute_td(&m, s5.medoids()).unwrap());
    }

    #[test]
    fn k_out_of_range() {
        let m = line(&SIX);
        for k in [0, 6, 7] {
            assert!(build_init(&m, k).is_err());
            assert!(random_init(&m, k, 1).is_err());
            assert!(parkjun_init(&m, k).is_err());
        }
    }

    #[test]
    fn lab_with_full_sample_matches_build() {
        let m = line(&SIX);
        let cfg = InitConfig { method: InitMethod::Lab, seed: 3, lab_sample_size: Some(100) };
        assert_eq!(lab_init(&m, 2, &cfg).unwrap().medoids(), &[2, 4]);
    }

    #[test]
    fn lab_is_seed_deterministic() {
        let pts: Vec<f64> = (0..200).map(|i| ((i * 7919) % 1013) as f64).collect();
        let m = line(&pts);
        let cfg = InitConfig::new(InitMethod::Lab, 42);
        let a = lab_init(&m, 8, &cfg).unwrap();
        let b = lab_init(&m, 8, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.td(), compute_td(&m, a.medoids()).unwrap());
        assert_eq!(lab_default_sample_size(200), 25);
        assert_eq!(lab_default_sample_size(20), 15);
    }

    #[test]
    fn kmeanspp_duplicates_fall_back() {
        let m = line(&[3.0; 5]);
        let s = kmeanspp_init(&m, 2, 9).unwrap();
        assert_eq!(s.k(), 2);
        assert_ne!(s.medoids()[0], s.medoids()[1]);
        assert_eq!(s.td(), 0.0);
    }

    #[test]
    fn parkjun_picks_central_objects() {
        let m = line(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(parkjun_init(&m, 1).unwrap().medoids(), &[2]);
        assert_eq!(parkjun_init(&m, 2).unwrap().medoids(), &[2, 1]);
    }

    #[test]
    fn parkjun_zero_rows() {
        let m = line(&[1.0, 1.0]);
        assert_eq!(parkjun_scores(&m), vec![0.0, 0.0]);
        assert_eq!(parkjun_init(&m, 1).unwrap().medoids(), &[0]);
    }

    #[test]
    fn random_init_distinct_and_reproducible() {
        let m = line(&SIX);
        let a = random_init(&m, 4, 11).unwrap();
        assert_eq!(a, random_init(&m, 4, 11).unwrap());
        let mut s = a.medoids().to_vec();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn method_names_parse() {
        for m in [
            InitMethod::Build,
            InitMethod::Lab,
            InitMethod::KMeansPlusPlus,
            InitMethod::Random,
            InitMethod::ParkJun,
        ] {
            assert_eq!(m.name().parse::<InitMethod>().unwrap(), m);
        }
    }
}
