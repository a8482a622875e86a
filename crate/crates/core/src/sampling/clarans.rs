use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::SampledResult;
use crate::error::{invalid, Result};
use crate::init::{check_k, random_medoids};
use crate::matrix::Dissimilarity;
use crate::rng::{self, Rng};
use crate::state::{apply_swap, compute_td, rebuild_cache, MedoidState, SwapCandidate};
use crate::swap::fastpam1::{argmin, scan_candidate};
use crate::swap::{improvement_limit, swap_delta, tie_tolerance, CounterMark, RunStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaransConfig {
    /// Consecutive failed draws that end a local search; `None` means
    /// `max(ceil(1.25% of k(n-k)), min_attempts)`.
    pub attempts: Option<usize>,
    /// Floor for the default attempt budget. 0 gives the plain 1.25% rule.
    pub min_attempts: usize,
    /// Independent local searches.
    pub numlocal: usize,
    /// FastCLARANS: draw only the non-medoid and try it against every slot,
    /// with the attempt budget divided by k.
    pub fast: bool,
    pub seed: u64,
}

impl ClaransConfig {
    pub fn clarans(seed: u64) -> Self {
        ClaransConfig { attempts: None, min_attempts: 250, numlocal: 2, fast: false, seed }
    }

    pub fn fastclarans(seed: u64) -> Self {
        ClaransConfig { fast: true, ..Self::clarans(seed) }
    }

    /// Failed draws allowed per local search for `n` objects and `k` medoids.
    pub fn attempt_budget(&self, n: usize, k: usize) -> usize {
        let edges = self.attempts.unwrap_or_else(|| {
            let p = (0.0125 * (k * (n - k)) as f64).ceil() as usize;
            p.max(self.min_attempts)
        });
        let draws = if self.fast { edges.div_ceil(k) } else { edges };
        draws.max(1)
    }
}

fn random_non_medoid(rng: &mut Rng, state: &MedoidState) -> usize {
    loop {
        let j = rng.random_range(0..state.n());
        if !state.is_medoid(j) {
            return j;
        }
    }
}

/// Randomized first-improvement search over the swap graph.
///
/// Each of `numlocal` searches starts from uniform random medoids and
/// follows the first improving swap it draws; it ends after the attempt
/// budget of consecutive non-improving draws. The best search is returned.
/// CLARANS draws a (slot, non-medoid) pair per attempt; FastCLARANS draws a
/// non-medoid and takes its best slot.
///
/// `stats.candidate_evaluations` counts swap-graph edges considered.
pub fn clarans<D: Dissimilarity>(matrix: &D, k: usize, config: &ClaransConfig) -> Result<SampledResult> {
    let n = matrix.len();
    check_k(n, k)?;
    if config.numlocal == 0 {
        return invalid("CLARANS needs at least one local search");
    }
    let budget = config.attempt_budget(n, k);
    let mark = CounterMark::take(matrix);
    let mut stats = RunStats::default();
    let mut best: Option<MedoidState> = None;
    let mut delta = vec![0.0; k];

    for local in 0..config.numlocal {
        let mut rng = rng::substream(config.seed, local as u64 + 1);
        let mut state = MedoidState::new(matrix, random_medoids(n, k, &mut rng))?;
        let mut cache = rebuild_cache(matrix, &state);
        if local == 0 {
            stats.initial_td = state.td();
        }
        let mut failures = 0;
        while failures < budget {
            stats.iterations += 1;
            let (slot, candidate, d) = if config.fast {
                let j = random_non_medoid(&mut rng, &state);
                stats.inner_work += scan_candidate(matrix, &cache, j, &mut delta);
                stats.candidate_evaluations += k as u64;
                let (slot, d) = argmin(&delta, tie_tolerance(state.td()));
                (slot, j, d)
            } else {
                let slot = rng.random_range(0..k);
                let j = random_non_medoid(&mut rng, &state);
                stats.inner_work += (n - k + 1) as u64;
                stats.candidate_evaluations += 1;
                (slot, j, swap_delta(matrix, &state, &cache, slot, j))
            };
            if d < improvement_limit(state.td()) {
                apply_swap(matrix, &mut state, &mut cache, &SwapCandidate { slot, candidate, delta_td: d })?;
                stats.swaps_executed += 1;
                failures = 0;
            } else {
                failures += 1;
            }
        }
        if best.as_ref().is_none_or(|b| state.td() < b.td()) {
            best = Some(state);
        }
    }

    let mut state = best.expect("at least one local search ran");
    let td = compute_td(matrix, state.medoids())?;
    state.set_td(td);
    stats.final_td = td;
    mark.settle(matrix, &mut stats);
    Ok(SampledResult { state, stats, used_full_data: false })
}

/// [`clarans`] with `config.fast` forced on.
pub fn fastclarans<D: Dissimilarity>(matrix: &D, k: usize, config: &ClaransConfig) -> Result<SampledResult> {
    clarans(matrix, k, &ClaransConfig { fast: true, ..*config })
}
