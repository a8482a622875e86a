use super::{check_inputs, CounterMark, RunStats};
use crate::error::Result;
use crate::matrix::Dissimilarity;
use crate::state::{rebuild_cache, AssignmentCache, MedoidState};

/// Park-Jun "k-means like" refinement: alternately move every medoid to
/// the member with the smallest distance sum within its cluster, then
/// reassign all objects to their nearest medoid. Stops as soon as TD does not
/// decrease. A medoid is only replaced by a strictly better member.
pub fn parkjun_refine<D: Dissimilarity>(
    matrix: &D,
    state: &mut MedoidState,
    cache: &mut AssignmentCache,
) -> Result<RunStats> {
    check_inputs(matrix, state, cache)?;
    let mark = CounterMark::take(matrix);
    let (n, k) = (matrix.len(), state.k());
    let mut stats = RunStats { initial_td: state.td(), ..RunStats::default() };

    loop {
        stats.iterations += 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for o in 0..n {
            members[cache.nearest[o]].push(o);
        }

        let mut medoids = state.medoids().to_vec();
        let mut changed = 0;
        for (slot, cluster) in members.iter().enumerate() {
            let in_cluster_sum = |c: usize| cluster.iter().map(|&o| matrix.get(o, c)).sum::<f64>();
            let mut best = (in_cluster_sum(medoids[slot]), medoids[slot]);
            for &c in cluster.iter().filter(|&&c| c != medoids[slot]) {
                let s = in_cluster_sum(c);
                if s < best.0 {
                    best = (s, c);
                }
            }
            stats.candidate_evaluations += cluster.len() as u64;
            stats.inner_work += (cluster.len() * cluster.len()) as u64;
            if best.1 != medoids[slot] {
                medoids[slot] = best.1;
                changed += 1;
            }
        }
        if changed == 0 {
            break;
        }

        let next = MedoidState::with_td(n, medoids, 0.0)?;
        let next_cache = rebuild_cache(matrix, &next);
        let td = next_cache.td();
        if td >= state.td() {
            break;
        }
        *state = next;
        state.set_td(td);
        *cache = next_cache;
        stats.swaps_executed += changed;
    }
    stats.final_td = state.td();
    mark.settle(matrix, &mut stats);
    Ok(stats)
}
