#![allow(dead_code)]

use fastpam::synth::{gaussian_mixture, uniform, MixtureSpec};
use fastpam::{build_matrix, Dataset, Dissimilarity, DissimilarityMatrix, Metric};

/// Euclidean matrix over points on a line.
pub fn line(points: &[f64]) -> DissimilarityMatrix {
    DissimilarityMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap()
}

/// A small random instance: uniform data for even seeds, a Gaussian mixture for odd ones.
pub fn instance(seed: u64, n: usize, dim: usize) -> (Dataset, DissimilarityMatrix) {
    let data = if seed % 2 == 0 {
        uniform(n, dim, seed).unwrap()
    } else {
        let clusters = 2 + (seed as usize / 2) % 4;
        gaussian_mixture(&MixtureSpec::new(clusters, dim, 0.15, n, seed)).unwrap().data
    };
    let m = build_matrix(&data, Metric::Euclidean).unwrap();
    (data, m)
}

/// TD computed directly from its definition.
pub fn naive_td<D: Dissimilarity>(m: &D, medoids: &[usize]) -> f64 {
    (0..m.len())
        .map(|o| medoids.iter().map(|&x| m.get(o, x)).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Every k-subset of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Global optimum by exhaustive enumeration.
pub fn brute_force<D: Dissimilarity>(m: &D, k: usize) -> (f64, Vec<usize>) {
    subsets(m.len(), k)
        .into_iter()
        .map(|s| (naive_td(m, &s), s))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}

/// Most negative ΔTD over all single swaps, recomputing TD from scratch for each.
pub fn best_naive_delta<D: Dissimilarity>(m: &D, medoids: &[usize]) -> f64 {
    let base = naive_td(m, medoids);
    let mut best = f64::INFINITY;
    for slot in 0..medoids.len() {
        for j in (0..m.len()).filter(|j| !medoids.contains(j)) {
            let mut s = medoids.to_vec();
            s[slot] = j;
            best = best.min(naive_td(m, &s) - base);
        }
    }
    best
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

pub mod props {
    use super::naive_td;
    use fastpam::*;
    use proptest::prelude::*;
    use proptest::test_runner::TestCaseError;

    pub type Outcome = std::result::Result<(), TestCaseError>;

    /// A random point cloud, a k below its size, and a seed.
    pub fn cloud() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, u64)> {
        (6usize..36, 1usize..4).prop_flat_map(|(n, dim)| {
            (
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), n),
                1usize..(n - 1).min(7),
                any::<u64>(),
            )
        })
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    fn matrix(rows: &[Vec<f64>]) -> DissimilarityMatrix {
        build_matrix(&Dataset::from_rows(rows.to_vec()).unwrap(), Metric::Euclidean).unwrap()
    }

    /// Applying random improving or worsening swaps keeps the running TD and
    /// the cache equal to a from-scratch recomputation.
    pub fn incremental_td(rows: &[Vec<f64>], k: usize, seed: u64) -> Outcome {
        use rand::Rng as _;
        let m = matrix(rows);
        let n = m.len();
        let mut rng = fastpam::rng::seeded(seed);
        let mut state = random_init(&m, k, seed).unwrap();
        let mut cache = rebuild_cache(&m, &state);
        for _ in 0..10 {
            let slot = rng.random_range(0..k);
            let pool: Vec<usize> = state.non_medoids().collect();
            let candidate = pool[rng.random_range(0..pool.len())];
            let delta_td = swap_delta(&m, &state, &cache, slot, candidate);
            apply_swap(&m, &mut state, &mut cache, &SwapCandidate { slot, candidate, delta_td }).unwrap();
            prop_assert!(close(state.td(), naive_td(&m, state.medoids())));
            prop_assert_eq!(&cache, &rebuild_cache(&m, &state));
        }
        prop_assert_eq!(n, cache.len());
        Ok(())
    }

    /// Every engine leaves a cache identical to a rebuild and a TD equal to the recomputed one.
    pub fn cache_after_refine(rows: &[Vec<f64>], k: usize, seed: u64) -> Outcome {
        let m = matrix(rows);
        for engine in [SwapEngine::Pam, SwapEngine::Reynolds, SwapEngine::FastPam1, SwapEngine::FastPam2] {
            if engine == SwapEngine::Reynolds && k == 1 {
                continue;
            }
            let mut state = random_init(&m, k, seed).unwrap();
            let mut cache = rebuild_cache(&m, &state);
            refine(&m, &mut state, &mut cache, &SwapConfig::new(engine)).unwrap();
            prop_assert_eq!(&cache, &rebuild_cache(&m, &state));
            prop_assert!(close(state.td(), naive_td(&m, state.medoids())));
        }
        Ok(())
    }

    /// ΔTD from the change function equals TD(after) − TD(before) for every swap.
    pub fn delta_decomposition(rows: &[Vec<f64>], k: usize, seed: u64) -> Outcome {
        let m = matrix(rows);
        let state = random_init(&m, k, seed).unwrap();
        let cache = rebuild_cache(&m, &state);
        let before = naive_td(&m, state.medoids());
        for slot in 0..k {
            for j in state.non_medoids() {
                let mut swapped = state.medoids().to_vec();
                swapped[slot] = j;
                let expect = naive_td(&m, &swapped) - before;
                prop_assert!(close(swap_delta(&m, &state, &cache, slot, j), expect));
            }
        }
        Ok(())
    }

    /// Same seed, same result, for every algorithm.
    pub fn seed_determinism(rows: &[Vec<f64>], k: usize, seed: u64) -> Outcome {
        let m = matrix(rows);
        for alg in Algorithm::ALL {
            if alg == Algorithm::Reynolds && k == 1 {
                continue;
            }
            let cfg = RunConfig::new(alg, seed);
            let a = run(&m, k, &cfg).unwrap();
            let b = run(&m, k, &cfg).unwrap();
            prop_assert_eq!(a.medoids, b.medoids, "{}", alg);
            prop_assert_eq!(a.td.to_bits(), b.td.to_bits());
            prop_assert_eq!(a.stats.iterations, b.stats.iterations);
        }
        Ok(())
    }

    /// Relabelling the objects relabels TD, ΔTD and the assignment cache.
    pub fn permutation_equivariance(rows: &[Vec<f64>], k: usize, seed: u64) -> Outcome {
        use rand::seq::SliceRandom;
        let data = Dataset::from_rows(rows.to_vec()).unwrap();
        let n = data.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut fastpam::rng::seeded(seed));
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let m = build_matrix(&data, Metric::Euclidean).unwrap();
        let mp = build_matrix(&data.permuted(&perm), Metric::Euclidean).unwrap();

        let state = random_init(&m, k, seed).unwrap();
        let mapped: Vec<usize> = state.medoids().iter().map(|&x| inv[x]).collect();
        let pstate = MedoidState::new(&mp, mapped).unwrap();
        prop_assert!(close(state.td(), pstate.td()));
        let (c, pc) = (rebuild_cache(&m, &state), rebuild_cache(&mp, &pstate));
        for o in 0..n {
            prop_assert_eq!(c.nearest[o], pc.nearest[inv[o]]);
            prop_assert_eq!(c.d_nearest[o], pc.d_nearest[inv[o]]);
        }
        for slot in 0..k {
            for j in state.non_medoids() {
                let a = swap_delta(&m, &state, &c, slot, j);
                let b = swap_delta(&mp, &pstate, &pc, slot, inv[j]);
                prop_assert!(close(a, b), "{} vs {}", a, b);
            }
        }
        Ok(())
    }

    /// Well separated groups of at least three points, one per medoid: data
    /// without the exact ΔTD ties that index-based tie breaking would resolve
    /// differently after relabelling.
    pub fn separated() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, u64)> {
        (2usize..6).prop_flat_map(|k| {
            (
                prop::collection::vec(prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 3..7), k),
                any::<u64>(),
            )
                .prop_map(move |(groups, seed)| {
                    let rows = groups
                        .iter()
                        .enumerate()
                        .flat_map(|(g, pts)| pts.iter().map(move |p| vec![p[0] + 100.0 * g as f64, p[1]]))
                        .collect();
                    (rows, k, seed)
                })
        })
    }

    /// Relabelling the objects relabels every deterministic algorithm's result.
    pub fn run_equivariance(rows: &[Vec<f64>], k: usize, seed: u64) -> Outcome {
        use rand::seq::SliceRandom;
        let data = Dataset::from_rows(rows.to_vec()).unwrap();
        let mut perm: Vec<usize> = (0..data.len()).collect();
        perm.shuffle(&mut fastpam::rng::seeded(seed));
        let m = build_matrix(&data, Metric::Euclidean).unwrap();
        let mp = build_matrix(&data.permuted(&perm), Metric::Euclidean).unwrap();
        for alg in [Algorithm::Pam, Algorithm::Reynolds, Algorithm::FastPam1, Algorithm::FastPam2, Algorithm::ParkJun] {
            let cfg = RunConfig::new(alg, seed);
            let a = run(&m, k, &cfg).unwrap();
            let b = run(&mp, k, &cfg).unwrap();
            prop_assert!(close(a.td, b.td), "{}: {} vs {}", alg, a.td, b.td);
            let mut mapped: Vec<usize> = b.medoids.iter().map(|&i| perm[i]).collect();
            mapped.sort_unstable();
            let mut orig = a.medoids.clone();
            orig.sort_unstable();
            prop_assert_eq!(mapped, orig, "{}", alg);
        }
        Ok(())
    }

    pub const ALL: [(&str, fn(&[Vec<f64>], usize, u64) -> Outcome); 5] = [
        ("incremental TD consistency", incremental_td),
        ("cache rebuild equality", cache_after_refine),
        ("ΔTD decomposition", delta_decomposition),
        ("seed determinism", seed_determinism),
        ("permutation equivariance", permutation_equivariance),
    ];
}
