use rand::seq::index;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::SampledResult;
use crate::error::{invalid, Result};
use crate::init::{check_k, initialize, InitConfig, InitMethod};
use crate::matrix::{Counted, Dissimilarity, DissimilarityMatrix};
use crate::rng;
use crate::state::{compute_td, rebuild_cache, MedoidState};
use crate::swap::{refine, CounterMark, RunStats, SwapConfig, SwapEngine};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaraConfig {
    /// Objects per subsample; `None` means `40 + 2k`.
    pub sample_size: Option<usize>,
    pub restarts: usize,
    pub engine: SwapConfig,
    pub init: InitConfig,
    pub seed: u64,
    /// Put the best medoids found so far into every later subsample.
    pub keep_best: bool,
}

impl ClaraConfig {
    /// Classic CLARA: PAM with BUILD, 5 restarts of 40 + 2k objects.
    pub fn clara(seed: u64) -> Self {
        ClaraConfig {
            sample_size: None,
            restarts: 5,
            engine: SwapConfig::new(SwapEngine::Pam),
            init: InitConfig::new(InitMethod::Build, seed),
            seed,
            keep_best: true,
        }
    }

    /// CLARA using FastPAM2 with LAB initialization.
    pub fn fastclara(seed: u64) -> Self {
        ClaraConfig {
            engine: SwapConfig::new(SwapEngine::FastPam2),
            init: InitConfig::new(InitMethod::Lab, seed),
            ..Self::clara(seed)
        }
    }

    /// Doubled preset: 10 restarts of 80 + 4k objects.
    pub fn doubled(mut self, k: usize) -> Self {
        self.sample_size = Some(80 + 4 * k);
        self.restarts = 10;
        self
    }

    pub fn sample_size_for(&self, k: usize) -> usize {
        self.sample_size.unwrap_or(40 + 2 * k)
    }
}

/// CLARA: runs the configured initialization and swap engine on repeated
/// uniform subsamples, assigns the full data to each result, and keeps the
/// medoids with the lowest full-data TD.
///
/// If the subsample would cover the whole data set, the engine runs once on
/// the full data and `used_full_data` is set.
pub fn clara<D: Dissimilarity>(matrix: &D, k: usize, config: &ClaraConfig) -> Result<SampledResult> {
    let n = matrix.len();
    check_k(n, k)?;
    let size = config.sample_size_for(k);
    if size <= k {
        return invalid(format!("sample size {size} must exceed k = {k}"));
    }
    if config.restarts == 0 {
        return invalid("CLARA needs at least one restart");
    }
    if size >= n {
        let mut state = initialize(matrix, k, &config.init)?;
        let mut cache = rebuild_cache(matrix, &state);
        let stats = refine(matrix, &mut state, &mut cache, &config.engine)?;
        return Ok(SampledResult { state, stats, used_full_data: true });
    }

    let mark = CounterMark::take(matrix);
    let counting = matrix.lookups().is_some();
    let mut stats = RunStats::default();
    let mut best: Option<(f64, Vec<usize>)> = None;

    for restart in 0..config.restarts {
        let mut rng = rng::substream(config.seed, restart as u64 + 1);
        let mut sample: Vec<usize> = match (&best, config.keep_best) {
            (Some((_, incumbent)), true) => {
                let mut taken = vec![false; n];
                for &m in incumbent {
                    taken[m] = true;
                }
                let rest: Vec<usize> = (0..n).filter(|&o| !taken[o]).collect();
                let mut s = incumbent.clone();
                s.extend(index::sample(&mut rng, rest.len(), size - k).into_iter().map(|i| rest[i]));
                s
            }
            _ => index::sample(&mut rng, n, size).into_vec(),
        };
        sample.sort_unstable();

        let sub = DissimilarityMatrix::from_subset(matrix, &sample)?;
        let init = InitConfig { seed: rng.next_u64(), ..config.init };
        let (sub_state, sub_stats) = if counting {
            let counted = Counted::new(&sub);
            run_engine(&counted, k, &init, &config.engine)?
        } else {
            run_engine(&sub, k, &init, &config.engine)?
        };
        stats.absorb(&sub_stats);

        let medoids: Vec<usize> = sub_state.medoids().iter().map(|&i| sample[i]).collect();
        let td = compute_td(matrix, &medoids)?;
        if restart == 0 {
            stats.initial_td = td;
        }
        if best.as_ref().is_none_or(|(b, _)| td < *b) {
            best = Some((td, medoids));
        }
    }

    let (_, medoids) = best.expect("at least one restart ran");
    let state = MedoidState::new(matrix, medoids)?;
    stats.final_td = state.td();
    mark.settle(matrix, &mut stats);
    Ok(SampledResult { state, stats, used_full_data: false })
}

fn run_engine<D: Dissimilarity>(
    matrix: &D,
    k: usize,
    init: &InitConfig,
    engine: &SwapConfig,
) -> Result<(MedoidState, RunStats)> {
    let mark = CounterMark::take(matrix);
    let mut state = initialize(matrix, k, init)?;
    let mut cache = rebuild_cache(matrix, &state);
    let mut stats = refine(matrix, &mut state, &mut cache, engine)?;
    // recount over the whole run so initialization is included
    stats.lookups = 0;
    stats.distance_evals = 0;
    mark.settle(matrix, &mut stats);
    Ok((state, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swap::tests::line;

    fn spread_line(n: usize) -> DissimilarityMatrix {
        let pts: Vec<f64> = (0..n).map(|i| ((i * 7919) % 1009) as f64 + (i % 7) as f64 * 0.01).collect();
        line(&pts)
    }

    #[test]
    fn large_sample_runs_plain_pam() {
        let m = spread_line(30);
        let mut cfg = ClaraConfig::clara(5);
        cfg.sample_size = Some(40);
        cfg.restarts = 1;
        let r = clara(&m, 3, &cfg).unwrap();
        assert!(r.used_full_data);
        let mut st = crate::init::build_init(&m, 3).unwrap();
        let mut c = rebuild_cache(&m, &st);
        crate::swap::pam_swap(&m, &mut st, &mut c, &SwapConfig::new(SwapEngine::Pam)).unwrap();
        assert_eq!(r.state.medoids(), st.medoids());
    }

    #[test]
    fn returns_best_full_td_and_is_deterministic() {
        let m = spread_line(200);
        let cfg = ClaraConfig::fastclara(17);
        let a = clara(&m, 4, &cfg).unwrap();
        let b = clara(&m, 4, &cfg).unwrap();
        assert_eq!(a.state, b.state);
        assert!(!a.used_full_data);
        assert_eq!(a.state.td(), compute_td(&m, a.state.medoids()).unwrap());
        assert!(a.stats.final_td <= a.stats.initial_td);
    }

    #[test]
    fn rejects_tiny_samples() {
        let m = spread_line(50);
        let mut cfg = ClaraConfig::clara(1);
        cfg.sample_size = Some(3);
        assert!(clara(&m, 3, &cfg).is_err());
        cfg.sample_size = Some(10);
        cfg.restarts = 0;
        assert!(clara(&m, 3, &cfg).is_err());
    }
}
