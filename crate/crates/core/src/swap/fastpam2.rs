use super::fastpam1::{argmin, scan_candidate};
use super::{check_inputs, improvement_limit, swap_delta, CounterMark, RunStats, SwapConfig, SwapRecord};
use crate::error::{invalid, Result};
use crate::matrix::Dissimilarity;
use crate::state::{apply_swap, AssignmentCache, MedoidState, SwapCandidate};

/// FastPAM2: the FastPAM1 scan keeps the best candidate for every slot, then
/// executes up to k swaps per iteration, best first.
///
/// After each executed swap the remaining candidates are re-evaluated; one
/// stays eligible only if its new ΔTD is at most `tau` times its stored ΔTD.
pub fn fastpam2_swap<D: Dissimilarity>(
    matrix: &D,
    state: &mut MedoidState,
    cache: &mut AssignmentCache,
    config: &SwapConfig,
) -> Result<RunStats> {
    check_inputs(matrix, state, cache)?;
    if !(0.0..=1.0).contains(&config.tau) {
        return invalid(format!("tau must lie in [0, 1], got {}", config.tau));
    }
    let mark = CounterMark::take(matrix);
    let (n, k) = (matrix.len(), state.k());
    let mut stats = RunStats { initial_td: state.td(), ..RunStats::default() };
    let mut delta = vec![0.0; k];
    let mut best_delta = vec![0.0; k];
    let mut best_x = vec![usize::MAX; k];

    loop {
        if config.max_iter > 0 && stats.iterations >= config.max_iter {
            stats.truncated = true;
            break;
        }
        stats.iterations += 1;
        let limit = improvement_limit(state.td());
        best_delta.fill(0.0);
        best_x.fill(usize::MAX);
        for j in 0..n {
            if state.is_medoid(j) {
                continue;
            }
            stats.inner_work += scan_candidate(matrix, cache, j, &mut delta);
            for i in 0..k {
                if delta[i] < best_delta[i] && delta[i] < limit {
                    best_delta[i] = delta[i];
                    best_x[i] = j;
                }
            }
        }
        stats.candidate_evaluations += (k * (n - k)) as u64;

        if argmin(&best_delta, -limit).1 >= 0.0 {
            break;
        }
        loop {
            let (slot, delta_td) = argmin(&best_delta, -limit);
            if delta_td >= 0.0 {
                break;
            }
            let candidate = best_x[slot];
            let removed = apply_swap(matrix, state, cache, &SwapCandidate { slot, candidate, delta_td })?;
            stats.swaps_executed += 1;
            if config.trace {
                stats.trace.push(SwapRecord {
                    iteration: stats.iterations,
                    slot,
                    removed,
                    added: candidate,
                    delta_td,
                });
            }
            best_delta[slot] = 0.0;
            for j in 0..k {
                if best_delta[j] >= 0.0 {
                    continue;
                }
                // an earlier swap may already have taken this candidate
                if state.is_medoid(best_x[j]) {
                    best_delta[j] = 0.0;
                    continue;
                }
                let recomputed = swap_delta(matrix, state, cache, j, best_x[j]);
                stats.candidate_evaluations += 1;
                stats.inner_work += (n - k + 1) as u64;
                best_delta[j] = if recomputed <= config.tau * best_delta[j] && recomputed < limit { recomputed } else { 0.0 };
            }
        }
    }
    stats.final_td = state.td();
    mark.settle(matrix, &mut stats);
    Ok(stats)
}
