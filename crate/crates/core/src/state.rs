//! Medoid sets, the nearest/second-nearest assignment cache, and swaps.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::Dissimilarity;

const NOT_A_MEDOID: usize = usize::MAX;

/// The current medoids (slot `i` holds object `medoids()[i]`) and their loss.
#[derive(Debug, Clone, PartialEq)]
pub struct MedoidState {
    medoids: Vec<usize>,
    slot_of: Vec<usize>,
    td: f64,
}

impl MedoidState {
    /// Validates `medoids` against `matrix` and computes TD from scratch.
    pub fn new<D: Dissimilarity>(matrix: &D, medoids: Vec<usize>) -> Result<Self> {
        let slot_of = slot_map(matrix.len(), &medoids)?;
        let td = compute_td(matrix, &medoids)?;
        Ok(MedoidState { medoids, slot_of, td })
    }

    /// Like [`MedoidState::new`] but trusts the supplied loss.
    pub fn with_td(n: usize, medoids: Vec<usize>, td: f64) -> Result<Self> {
        let slot_of = slot_map(n, &medoids)?;
        Ok(MedoidState { medoids, slot_of, td })
    }

    pub fn medoids(&self) -> &[usize] {
        &self.medoids
    }

    pub fn into_medoids(self) -> Vec<usize> {
        self.medoids
    }

    pub fn k(&self) -> usize {
        self.medoids.len()
    }

    /// Number of objects the state is defined over.
    pub fn n(&self) -> usize {
        self.slot_of.len()
    }

    pub fn td(&self) -> f64 {
        self.td
    }

    pub fn set_td(&mut self, td: f64) {
        self.td = td;
    }

    /// Slot holding object `o`, if `o` is a medoid.
    #[inline]
    pub fn slot_of(&self, o: usize) -> Option<usize> {
        match self.slot_of[o] {
            NOT_A_MEDOID => None,
            s => Some(s),
        }
    }

    #[inline]
    pub fn is_medoid(&self, o: usize) -> bool {
        self.slot_of[o] != NOT_A_MEDOID
    }

    /// Non-medoid objects in ascending order.
    pub fn non_medoids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&o| !self.is_medoid(o))
    }

    /// Puts `object` into `slot` without touching TD or any cache.
    fn replace(&mut self, slot: usize, object: usize) -> usize {
        let old = self.medoids[slot];
        self.slot_of[old] = NOT_A_MEDOID;
        self.slot_of[object] = slot;
        self.medoids[slot] = object;
        old
    }
}

fn slot_map(n: usize, medoids: &[usize]) -> Result<Vec<usize>> {
    if medoids.is_empty() {
        return invalid("medoid list is empty");
    }
    let mut slot_of = vec![NOT_A_MEDOID; n];
    for (slot, &m) in medoids.iter().enumerate() {
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, len: n });
        }
        if slot_of[m] != NOT_A_MEDOID {
            return invalid(format!("object {m} appears twice in the medoid list"));
        }
        slot_of[m] = slot;
    }
    Ok(slot_of)
}

/// Total deviation: the sum over all objects of the distance to their nearest
/// medoid, accumulated in ascending object order.
pub fn compute_td<D: Dissimilarity>(matrix: &D, medoids: &[usize]) -> Result<f64> {
    let n = matrix.len();
    if medoids.is_empty() {
        return invalid("medoid list is empty");
    }
    if let Some(&bad) = medoids.iter().find(|&&m| m >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut td = 0.0;
    for o in 0..n {
        let mut best = f64::INFINITY;
        for &m in medoids {
            let d = if m == o { 0.0 } else { matrix.get(o, m) };
            if d < best {
                best = d;
            }
        }
        td += best;
    }
    Ok(td)
}

/// Per-object nearest medoid slot with nearest and second-nearest distances.
///
/// With a single medoid, `d_second` is `+inf` everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentCache {
    pub nearest: Vec<usize>,
    pub d_nearest: Vec<f64>,
    pub d_second: Vec<f64>,
}

impl AssignmentCache {
    pub fn len(&self) -> usize {
        self.nearest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nearest.is_empty()
    }

    /// Sum of nearest distances in ascending object order.
    pub fn td(&self) -> f64 {
        self.d_nearest.iter().sum()
    }

    /// Medoid object each data object is assigned to.
    pub fn labels(&self, state: &MedoidState) -> Vec<usize> {
        self.nearest.iter().map(|&s| state.medoids[s]).collect()
    }
}

/// Nearest slot, nearest distance and second distance for object `o`.
///
/// A medoid is always assigned to its own slot. Otherwise ties go to the
/// lowest slot.
#[inline]
fn scan_object<D: Dissimilarity>(matrix: &D, state: &MedoidState, o: usize) -> (usize, f64, f64) {
    if let Some(own) = state.slot_of(o) {
        let mut second = f64::INFINITY;
        for (s, &m) in state.medoids.iter().enumerate() {
            if s != own {
                let d = matrix.get(o, m);
                if d < second {
                    second = d;
                }
            }
        }
        return (own, 0.0, second);
    }
    let (mut nearest, mut dn, mut ds) = (0, f64::INFINITY, f64::INFINITY);
    for (s, &m) in state.medoids.iter().enumerate() {
        let d = matrix.get(o, m);
        if d < dn {
            ds = dn;
            dn = d;
            nearest = s;
        } else if d < ds {
            ds = d;
        }
    }
    (nearest, dn, ds)
}

/// Computes the assignment cache from scratch, O(nk).
pub fn rebuild_cache<D: Dissimilarity>(matrix: &D, state: &MedoidState) -> AssignmentCache {
    let n = matrix.len();
    let mut cache = AssignmentCache {
        nearest: Vec::with_capacity(n),
        d_nearest: Vec::with_capacity(n),
        d_second: Vec::with_capacity(n),
    };
    for o in 0..n {
        let (s, dn, ds) = scan_object(matrix, state, o);
        cache.nearest.push(s);
        cache.d_nearest.push(dn);
        cache.d_second.push(ds);
    }
    cache
}

/// A proposed exchange of the medoid in `slot` for the non-medoid `candidate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapCandidate {
    pub slot: usize,
    pub candidate: usize,
    /// Change in TD the swap causes; negative is an improvement.
    pub delta_td: f64,
}

/// Executes `swap`, adds its `delta_td` to the state's TD and brings the cache
/// up to date. Returns the object that left the medoid set.
///
/// Objects that were assigned to the removed medoid, or that may have had it
/// as second nearest, are rescanned over all medoids; all others only compare
/// against the new medoid.
pub fn apply_swap<D: Dissimilarity>(
    matrix: &D,
    state: &mut MedoidState,
    cache: &mut AssignmentCache,
    swap: &SwapCandidate,
) -> Result<usize> {
    let SwapCandidate { slot, candidate, delta_td } = *swap;
    if slot >= state.k() {
        return invalid(format!("slot {slot} out of range for k = {}", state.k()));
    }
    if candidate >= state.n() {
        return Err(Error::IndexOutOfRange { index: candidate, len: state.n() });
    }
    if state.is_medoid(candidate) {
        return invalid(format!("object {candidate} is already a medoid"));
    }
    let old = state.replace(slot, candidate);
    state.td += delta_td;
    update_cache_after_swap(matrix, state, cache, slot, old);
    Ok(old)
}

pub(crate) fn update_cache_after_swap<D: Dissimilarity>(
    matrix: &D,
    state: &MedoidState,
    cache: &mut AssignmentCache,
    slot: usize,
    old: usize,
) {
    let new = state.medoids[slot];
    for o in 0..matrix.len() {
        let rescan = state.is_medoid(o) || o == old || cache.nearest[o] == slot || {
            // The removed medoid may have been second nearest.
            matrix.get(o, old) <= cache.d_second[o]
        };
        if rescan {
            let (s, dn, ds) = scan_object(matrix, state, o);
            cache.nearest[o] = s;
            cache.d_nearest[o] = dn;
            cache.d_second[o] = ds;
            continue;
        }
        let d = matrix.get(o, new);
        let dn = cache.d_nearest[o];
        if d < dn || (d == dn && slot < cache.nearest[o]) {
            cache.d_second[o] = dn;
            cache.d_nearest[o] = d;
            cache.nearest[o] = slot;
        } else if d < cache.d_second[o] {
            cache.d_second[o] = d;
        }
    }
}
