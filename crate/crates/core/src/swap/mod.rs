//! SWAP refinement: PAM, Reynolds, FastPAM1, FastPAM2, and the Park-Jun
//! alternating refinement.
//!
//! All engines refine a [`MedoidState`] in place and keep its
//! [`AssignmentCache`] valid. Candidate ties are broken by the lowest
//! candidate object index, then the lowest slot, so PAM, Reynolds and
//! FastPAM1 choose the same swap whenever their ΔTD values agree.

pub(crate) mod fastpam1;
mod fastpam2;
mod pam;
mod parkjun;
mod reynolds;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::Dissimilarity;
use crate::state::{AssignmentCache, MedoidState};

pub use fastpam1::fastpam1_swap;
pub use fastpam2::fastpam2_swap;
pub use pam::pam_swap;
pub use parkjun::parkjun_refine;
pub use reynolds::{removal_losses, reynolds_swap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwapEngine {
    Pam,
    Reynolds,
    #[serde(rename = "fastpam1")]
    FastPam1,
    #[serde(rename = "fastpam2")]
    FastPam2,
}

impl SwapEngine {
    pub fn name(self) -> &'static str {
        match self {
            SwapEngine::Pam => "pam",
            SwapEngine::Reynolds => "reynolds",
            SwapEngine::FastPam1 => "fastpam1",
            SwapEngine::FastPam2 => "fastpam2",
        }
    }
}

impl fmt::Display for SwapEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SwapEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pam" => Ok(SwapEngine::Pam),
            "reynolds" => Ok(SwapEngine::Reynolds),
            "fastpam1" => Ok(SwapEngine::FastPam1),
            "fastpam2" => Ok(SwapEngine::FastPam2),
            other => Err(Error::InvalidArgument(format!("unknown swap engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapConfig {
    pub engine: SwapEngine,
    /// FastPAM2 recheck tolerance: 1 executes only swaps whose ΔTD did not
    /// get worse, 0 executes any swap that still improves.
    pub tau: f64,
    /// Iteration cap, 0 for unlimited. The iteration count has no useful
    /// worst-case bound, so long-running jobs may want one.
    pub max_iter: usize,
    /// Record every executed swap in [`RunStats::trace`].
    pub trace: bool,
}

impl SwapConfig {
    pub fn new(engine: SwapEngine) -> Self {
        SwapConfig { engine, tau: 0.0, max_iter: 0, trace: false }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

impl Default for SwapConfig {
    fn default() -> Self {
        SwapConfig::new(SwapEngine::FastPam2)
    }
}

/// One executed swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapRecord {
    pub iteration: usize,
    pub slot: usize,
    pub removed: usize,
    pub added: usize,
    pub delta_td: f64,
}

/// Counters collected while refining.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Full scans performed, including the last one that found nothing.
    pub iterations: usize,
    pub swaps_executed: usize,
    /// (slot, candidate) swaps whose ΔTD was evaluated.
    pub candidate_evaluations: u64,
    /// Elementary ΔTD accumulation steps: change-function evaluations for
    /// PAM, per-slot array updates for FastPAM.
    pub inner_work: u64,
    /// Dissimilarity lookups, when the accessor counts them.
    pub lookups: u64,
    /// Metric evaluations, when distances are computed on demand.
    pub distance_evals: u64,
    pub initial_td: f64,
    pub final_td: f64,
    /// The iteration cap stopped the run before convergence.
    pub truncated: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<SwapRecord>,
}

impl RunStats {
    /// Folds the counters of `other` into `self`; TD fields are left alone.
    pub fn absorb(&mut self, other: &RunStats) {
        self.iterations += other.iterations;
        self.swaps_executed += other.swaps_executed;
        self.candidate_evaluations += other.candidate_evaluations;
        self.inner_work += other.inner_work;
        self.lookups += other.lookups;
        self.distance_evals += other.distance_evals;
        self.truncated |= other.truncated;
    }
}

/// Snapshot of an accessor's counters, used to attribute them to one run.
#[derive(Clone, Copy)]
pub(crate) struct CounterMark {
    lookups: Option<u64>,
    evals: Option<u64>,
}

impl CounterMark {
    pub(crate) fn take<D: Dissimilarity>(matrix: &D) -> Self {
        CounterMark { lookups: matrix.lookups(), evals: matrix.distance_evals() }
    }

    pub(crate) fn settle<D: Dissimilarity>(self, matrix: &D, stats: &mut RunStats) {
        if let (Some(a), Some(b)) = (self.lookups, matrix.lookups()) {
            stats.lookups += b - a;
        }
        if let (Some(a), Some(b)) = (self.evals, matrix.distance_evals()) {
            stats.distance_evals += b - a;
        }
    }
}

/// Contribution of object `o` to ΔTD when the medoid in `slot` is replaced
/// by the non-medoid `candidate`.
///
/// `min(d(o, x), d_second(o)) - d_nearest(o)` if `o` is assigned to `slot`,
/// otherwise `min(d(o, x) - d_nearest(o), 0)`.
#[inline]
pub fn change<D: Dissimilarity>(
    matrix: &D,
    cache: &AssignmentCache,
    o: usize,
    slot: usize,
    candidate: usize,
) -> f64 {
    let doj = if o == candidate { 0.0 } else { matrix.get(o, candidate) };
    change_with_distance(cache, o, slot, doj)
}

#[inline]
pub(crate) fn change_with_distance(cache: &AssignmentCache, o: usize, slot: usize, doj: f64) -> f64 {
    let dn = cache.d_nearest[o];
    if cache.nearest[o] == slot {
        doj.min(cache.d_second[o]) - dn
    } else {
        (doj - dn).min(0.0)
    }
}

/// ΔTD of swapping `slot` for `candidate`, summed over every object that is
/// not one of the other medoids. The candidate's own term comes first, then
/// the rest in ascending order; FastPAM1 accumulates in the same order.
pub fn swap_delta<D: Dissimilarity>(
    matrix: &D,
    state: &MedoidState,
    cache: &AssignmentCache,
    slot: usize,
    candidate: usize,
) -> f64 {
    let removed = state.medoids()[slot];
    let mut delta = 0.0;
    delta += change_with_distance(cache, candidate, slot, 0.0);
    for o in 0..matrix.len() {
        if o == candidate || (o != removed && state.is_medoid(o)) {
            continue;
        }
        delta += change(matrix, cache, o, slot, candidate);
    }
    delta
}

/// Largest ΔTD still counted as an improvement for a configuration with
/// total deviation `td`. Swaps whose true ΔTD is zero (a medoid trading
/// places with the only other member of its cluster) can evaluate to a tiny
/// negative number under some summation orders; requiring a relative gain
/// keeps every engine from cycling on them.
#[inline]
pub fn improvement_limit(td: f64) -> f64 {
    -tie_tolerance(td)
}

/// ΔTD values closer than this are treated as equal and fall back to the
/// index tie rule, so the choice does not depend on summation order.
#[inline]
pub fn tie_tolerance(td: f64) -> f64 {
    1e-12 * td.abs()
}

/// Whether (delta, candidate, slot) beats the incumbent under the
/// lowest-candidate-then-lowest-slot tie rule, with values within `tol`
/// counting as ties.
#[inline]
pub(crate) fn improves(
    delta: f64,
    candidate: usize,
    slot: usize,
    best: &Option<(f64, usize, usize)>,
    tol: f64,
) -> bool {
    match best {
        None => delta < 0.0,
        Some((bd, bj, bi)) => delta < *bd - tol || (delta <= *bd + tol && (candidate, slot) < (*bj, *bi)),
    }
}

/// The best single swap by a full scan of all k(n-k) pairs, if any improves
/// TD by more than `tolerance`.
pub fn best_swap<D: Dissimilarity>(
    matrix: &D,
    state: &MedoidState,
    cache: &AssignmentCache,
    tolerance: f64,
) -> Option<crate::state::SwapCandidate> {
    let tol = tie_tolerance(state.td());
    let mut best: Option<(f64, usize, usize)> = None;
    for slot in 0..state.k() {
        for j in state.non_medoids() {
            let delta = swap_delta(matrix, state, cache, slot, j);
            if delta < -tolerance && improves(delta, j, slot, &best, tol) {
                best = Some((delta, j, slot));
            }
        }
    }
    best.map(|(delta_td, candidate, slot)| crate::state::SwapCandidate { slot, candidate, delta_td })
}

pub(crate) fn check_inputs<D: Dissimilarity>(
    matrix: &D,
    state: &MedoidState,
    cache: &AssignmentCache,
) -> Result<()> {
    let n = matrix.len();
    if state.n() != n || cache.len() != n {
        return invalid(format!(
            "state covers {} objects and cache {}, matrix has {n}",
            state.n(),
            cache.len()
        ));
    }
    if state.k() >= n {
        return invalid(format!("k must be below n, got k = {}, n = {n}", state.k()));
    }
    Ok(())
}

/// Runs the configured engine to convergence.
pub fn refine<D: Dissimilarity>(
    matrix: &D,
    state: &mut MedoidState,
    cache: &mut AssignmentCache,
    config: &SwapConfig,
) -> Result<RunStats> {
    match config.engine {
        SwapEngine::Pam => pam_swap(matrix, state, cache, config),
        SwapEngine::Reynolds => reynolds_swap(matrix, state, cache, config),
        SwapEngine::FastPam1 => fastpam1_swap(matrix, state, cache, config),
        SwapEngine::FastPam2 => fastpam2_swap(matrix, state, cache, config),
    }
}

/// Writes a swap trace as CSV: `iteration,slot,out,in,delta_td`.
pub fn write_trace_csv<W: Write>(trace: &[SwapRecord], mut out: W) -> Result<()> {
    writeln!(out, "iteration,slot,out,in,delta_td")?;
    for r in trace {
        writeln!(out, "{},{},{},{},{:?}", r.iteration, r.slot, r.removed, r.added, r.delta_td)?;
    }
    Ok(())
}
