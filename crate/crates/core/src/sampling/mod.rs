//! Sampling meta-algorithms on top of the swap engines: CLARA and CLARANS,
//! with their FastCLARA and FastCLARANS variants.

mod clara;
mod clarans;

pub use clara::{clara, ClaraConfig};
pub use clarans::{clarans, fastclarans, ClaransConfig};

use crate::state::MedoidState;
use crate::swap::RunStats;

/// Medoids over the full data set plus counters summed over all sub-runs.
#[derive(Debug, Clone)]
pub struct SampledResult {
    pub state: MedoidState,
    pub stats: RunStats,
    /// The requested subsample covered the whole data set.
    pub used_full_data: bool,
}
