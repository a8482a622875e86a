//! k-medoids clustering with the PAM family of algorithms.
//!
//! The crate implements PAM (BUILD + SWAP), the Reynolds decomposition,
//! FastPAM1 (exactly PAM's swaps at O(k) less work), FastPAM2 (several swaps
//! per iteration), the LAB and k-means++ initializations, CLARA/FastCLARA,
//! CLARANS/FastCLARANS, and the Park-Jun "k-means like" baseline.
//!
//! ```
//! use fastpam::{build_matrix, run, Algorithm, Dataset, Metric, RunConfig};
//!
//! let data = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0], vec![6.0], vec![7.0], vec![8.0]]).unwrap();
//! let matrix = build_matrix(&data, Metric::Manhattan).unwrap();
//! let out = run(&matrix, 2, &RunConfig::new(Algorithm::FastPam1, 0)).unwrap();
//! assert_eq!(out.medoids, vec![1, 4]);
//! assert_eq!(out.td, 4.0);
//! ```

pub mod dissimilarity;
pub mod error;
pub mod init;
pub mod matrix;
pub mod pipeline;
pub mod rng;
pub mod sampling;
pub mod state;
pub mod swap;
pub mod synth;

pub use dissimilarity::{build_matrix, load_matrix, save_matrix, Dataset, Metric, VectorSpace};
pub use error::{Error, Result};
pub use init::{
    build_init, initialize, kmeanspp_init, lab_init, parkjun_init, random_init, InitConfig, InitMethod,
};
pub use matrix::{Counted, Dissimilarity, DissimilarityMatrix};
pub use pipeline::{run, Algorithm, RunConfig, RunOutput};
pub use sampling::{clara, clarans, fastclarans, ClaraConfig, ClaransConfig, SampledResult};
pub use state::{apply_swap, compute_td, rebuild_cache, AssignmentCache, MedoidState, SwapCandidate};
pub use swap::{
    best_swap, change, fastpam1_swap, fastpam2_swap, pam_swap, parkjun_refine, refine, reynolds_swap,
    improvement_limit, swap_delta, tie_tolerance, RunStats, SwapConfig, SwapEngine, SwapRecord,
};
