use super::{check_inputs, improvement_limit, improves, CounterMark, RunStats, SwapConfig, SwapRecord};
use crate::error::{invalid, Result};
use crate::matrix::Dissimilarity;
use crate::state::{apply_swap, AssignmentCache, MedoidState, SwapCandidate};

/// Loss of removing each medoid and sending its members to their second
/// nearest medoid: `sum over o in C_i of d_second(o) - d_nearest(o)`.
pub fn removal_losses(cache: &AssignmentCache, k: usize) -> Vec<f64> {
    let mut loss = vec![0.0; k];
    for o in 0..cache.len() {
        loss[cache.nearest[o]] += cache.d_second[o] - cache.d_nearest[o];
    }
    loss
}

/// PAM SWAP with the removal/addition decomposition: the removal loss is
/// computed once per medoid, and each candidate only adds the gain of the
/// objects it pulls in. Same result as PAM, different evaluation order.
///
/// Requires k >= 2: with one medoid the removal loss is unbounded.
pub fn reynolds_swap<D: Dissimilarity>(
    matrix: &D,
    state: &mut MedoidState,
    cache: &mut AssignmentCache,
    config: &SwapConfig,
) -> Result<RunStats> {
    check_inputs(matrix, state, cache)?;
    if state.k() < 2 {
        return invalid("the Reynolds engine needs k >= 2");
    }
    let mark = CounterMark::take(matrix);
    let (n, k) = (matrix.len(), state.k());
    let mut stats = RunStats { initial_td: state.td(), ..RunStats::default() };
    // distance to the nearest remaining medoid once the current slot is removed
    let mut after_removal = vec![0.0; n];

    loop {
        if config.max_iter > 0 && stats.iterations >= config.max_iter {
            stats.truncated = true;
            break;
        }
        stats.iterations += 1;
        let removal = removal_losses(cache, k);
        stats.inner_work += n as u64;

        let limit = improvement_limit(state.td());
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..k {
            let removed = state.medoids()[slot];
            for o in 0..n {
                after_removal[o] =
                    if cache.nearest[o] == slot { cache.d_second[o] } else { cache.d_nearest[o] };
            }
            for j in 0..n {
                if state.is_medoid(j) {
                    continue;
                }
                let mut delta = removal[slot];
                for o in 0..n {
                    if o != removed && state.is_medoid(o) {
                        continue;
                    }
                    let d = if o == j { 0.0 } else { matrix.get(o, j) };
                    if d < after_removal[o] {
                        delta += d - after_removal[o];
                    }
                }
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
