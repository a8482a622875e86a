use super::{check_inputs, improvement_limit, improves, swap_delta, CounterMark, RunStats, SwapConfig, SwapRecord};
use crate::error::Result;
use crate::matrix::Dissimilarity;
use crate::state::{apply_swap, AssignmentCache, MedoidState, SwapCandidate};

/// Original PAM SWAP: every iteration evaluates all k(n-k) swaps with the
/// change function and executes the single best one, until none improves.
pub fn pam_swap<D: Dissimilarity>(
    matrix: &D,
    state: &mut MedoidState,
    cache: &mut AssignmentCache,
    config: &SwapConfig,
) -> Result<RunStats> {
    check_inputs(matrix, state, cache)?;
    let mark = CounterMark::take(matrix);
    let (n, k) = (matrix.len(), state.k());
    let mut stats = RunStats { initial_td: state.td(), ..RunStats::default() };

    loop {
        if config.max_iter > 0 && stats.iterations >= config.max_iter {
            stats.truncated = true;
            break;
        }
        stats.iterations += 1;
        let limit = improvement_limit(state.td());
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..k {
            for j in 0..n {
                if state.is_medoid(j) {
                    continue;
                }
                let delta = swap_delta(matrix, state, cache, slot, j);
                if delta < limit && improves(delta, j, slot, &best, -limit) {
                    best = Some((delta, j, slot));
                }
            }
        }
        let pairs = (k * (n - k)) as u64;
        stats.candidate_evaluations += pairs;
        stats.inner_work += pairs * (n - k + 1) as u64;

        let Some((delta_td, candidate, slot)) = best else {
            break;
        };
        let removed = apply_swap(matrix, state, cache, &SwapCandidate { slot, candidate, delta_td })?;
        stats.swaps_executed += 1;
        if config.trace {
            stats.trace.push(SwapRecord { iteration: stats.iterations, slot, removed, added: candidate, delta_td });
        }
    }
    stats.final_td = state.td();
    mark.settle(matrix, &mut stats);
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swap::tests::{line, SIX};
    use crate::state::{compute_td, rebuild_cache};
    use crate::swap::SwapEngine;

    #[test]
    fn six_points_from_build_state() {
        let m = line(&SIX);
        let mut st = MedoidState::new(&m, vec![2, 4]).unwrap();
        let mut c = rebuild_cache(&m, &st);
        let stats = pam_swap(&m, &mut st, &mut c, &SwapConfig::new(SwapEngine::Pam).with_trace()).unwrap();
        assert_eq!(st.medoids(), &[1, 4]);
        assert_eq!(st.td(), 4.0);
        assert_eq!(stats.iterations, 2);
        assert_eq!(stats.swaps_executed, 1);
        assert_eq!(stats.candidate_evaluations, 2 * 2 * 4);
        assert_eq!(
            stats.trace,
            vec![SwapRecord { iteration: 1, slot: 0, removed: 2, added: 1, delta_td: -1.0 }]
        );
    }

    #[test]
    fn optimum_converges_immediately() {
        let m = line(&SIX);
        let mut st = MedoidState::new(&m, vec![1, 4]).unwrap();
        let mut c = rebuild_cache(&m, &st);
        let stats = pam_swap(&m, &mut st, &mut c, &SwapConfig::new(SwapEngine::Pam)).unwrap();
        assert_eq!((stats.iterations, stats.swaps_executed), (1, 0));
        assert_eq!(stats.final_td, 4.0);
    }

    #[test]
    fn max_iter_truncates() {
        let pts: Vec<f64> = (0..30).map(|i| ((i * 37) % 101) as f64).collect();
        let m = line(&pts);
        let mut st = MedoidState::new(&m, vec![0, 1, 2]).unwrap();
        let mut c = rebuild_cache(&m, &st);
        let cfg = SwapConfig::new(SwapEngine::Pam).with_max_iter(1);
        let stats = pam_swap(&m, &mut st, &mut c, &cfg).unwrap();
        assert!(stats.truncated);
        assert_eq!(stats.iterations, 1);
        assert_eq!(st.td(), compute_td(&m, st.medoids()).unwrap());
    }

    #[test]
    fn single_medoid() {
        let m = line(&SIX);
        let mut st = MedoidState::new(&m, vec![0]).unwrap();
        let mut c = rebuild_cache(&m, &st);
        pam_swap(&m, &mut st, &mut c, &SwapConfig::new(SwapEngine::Pam)).unwrap();
        assert_eq!(st.medoids(), &[2]);
        assert_eq!(st.td(), 18.0);
    }
}
