//! One entry point for every algorithm: initialization, refinement, timing.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::init::{initialize, InitConfig, InitMethod};
use crate::matrix::Dissimilarity;
use crate::sampling::{clara, clarans, ClaraConfig, ClaransConfig};
use crate::state::{rebuild_cache, MedoidState};
use crate::swap::{parkjun_refine, refine, CounterMark, RunStats, SwapConfig, SwapEngine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pam,
    Reynolds,
    #[serde(rename = "fastpam1")]
    FastPam1,
    #[serde(rename = "fastpam2")]
    FastPam2,
    #[serde(rename = "parkjun")]
    ParkJun,
    Clara,
    #[serde(rename = "fastclara")]
    FastClara,
    Clarans,
    #[serde(rename = "fastclarans")]
    FastClarans,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Pam,
        Algorithm::Reynolds,
        Algorithm::FastPam1,
        Algorithm::FastPam2,
        Algorithm::ParkJun,
        Algorithm::Clara,
        Algorithm::FastClara,
        Algorithm::Clarans,
        Algorithm::FastClarans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pam => "pam",
            Algorithm::Reynolds => "reynolds",
            Algorithm::FastPam1 => "fastpam1",
            Algorithm::FastPam2 => "fastpam2",
            Algorithm::ParkJun => "parkjun",
            Algorithm::Clara => "clara",
            Algorithm::FastClara => "fastclara",
            Algorithm::Clarans => "clarans",
            Algorithm::FastClarans => "fastclarans",
        }
    }

    /// Initialization used when none is requested.
    pub fn default_init(self) -> InitMethod {
        match self {
            Algorithm::ParkJun => InitMethod::ParkJun,
            Algorithm::FastClara => InitMethod::Lab,
            Algorithm::Clarans | Algorithm::FastClarans => InitMethod::Random,
            _ => InitMethod::Build,
        }
    }

    fn swap_engine(self) -> Option<SwapEngine> {
        match self {
            Algorithm::Pam | Algorithm::Clara => Some(SwapEngine::Pam),
            Algorithm::Reynolds => Some(SwapEngine::Reynolds),
            Algorithm::FastPam1 => Some(SwapEngine::FastPam1),
            Algorithm::FastPam2 | Algorithm::FastClara => Some(SwapEngine::FastPam2),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm '{s}'")))
    }
}

/// Everything needed to run one algorithm; unset options take the
/// algorithm's defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub init: Option<InitMethod>,
    pub seed: u64,
    pub tau: f64,
    pub max_iter: usize,
    pub trace: bool,
    pub lab_sample_size: Option<usize>,
    pub sample_size: Option<usize>,
    pub restarts: Option<usize>,
    pub attempts: Option<usize>,
    pub min_attempts: Option<usize>,
    pub numlocal: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::FastPam2,
            init: None,
            seed: 0,
            tau: 0.0,
            max_iter: 0,
            trace: false,
            lab_sample_size: None,
            sample_size: None,
            restarts: None,
            attempts: None,
            min_attempts: None,
            numlocal: None,
        }
    }
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        RunConfig { algorithm, seed, ..RunConfig::default() }
    }

    pub fn with_init(mut self, init: InitMethod) -> Self {
        self.init = Some(init);
        self
    }

    pub fn init_config(&self) -> InitConfig {
        InitConfig {
            method: self.init.unwrap_or_else(|| self.algorithm.default_init()),
            seed: self.seed,
            lab_sample_size: self.lab_sample_size,
        }
    }

    fn swap_config(&self, engine: SwapEngine) -> SwapConfig {
        SwapConfig { engine, tau: self.tau, max_iter: self.max_iter, trace: self.trace }
    }

    pub fn clara_config(&self) -> ClaraConfig {
        let base = match self.algorithm {
            Algorithm::FastClara => ClaraConfig::fastclara(self.seed),
            _ => ClaraConfig::clara(self.seed),
        };
        ClaraConfig {
            sample_size: self.sample_size.or(base.sample_size),
            restarts: self.restarts.unwrap_or(base.restarts),
            engine: self.swap_config(base.engine.engine),
            init: self.init_config(),
            ..base
        }
    }

    pub fn clarans_config(&self) -> ClaransConfig {
        let base = match self.algorithm {
            Algorithm::FastClarans => ClaransConfig::fastclarans(self.seed),
            _ => ClaransConfig::clarans(self.seed),
        };
        ClaransConfig {
            attempts: self.attempts,
            min_attempts: self.min_attempts.unwrap_or(base.min_attempts),
            numlocal: self.numlocal.unwrap_or(base.numlocal),
            ..base
        }
    }
}

/// Result of a full clustering run.
#[derive(Debug, Clone, Serialize)]
pub struct RunOutput {
    pub medoids: Vec<usize>,
    /// Slot (index into `medoids`) of each object's nearest medoid.
    pub assignment: Vec<usize>,
    pub td: f64,
    /// TD right after initialization; for sampling algorithms, of the first sub-run.
    pub initial_td: f64,
    pub stats: RunStats,
    pub used_full_data: bool,
    pub init_ms: f64,
    pub refine_ms: f64,
    pub total_ms: f64,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Runs `config.algorithm` with `k` medoids. `k == n` is accepted and
/// returns every object as its own medoid.
pub fn run<D: Dissimilarity>(matrix: &D, k: usize, config: &RunConfig) -> Result<RunOutput> {
    let n = matrix.len();
    if k == 0 || k > n {
        return invalid(format!("k must satisfy 1 <= k <= n, got k = {k}, n = {n}"));
    }
    let start = Instant::now();
    if k == n {
        let medoids: Vec<usize> = (0..n).collect();
        return Ok(RunOutput {
            assignment: medoids.clone(),
            medoids,
            td: 0.0,
            initial_td: 0.0,
            stats: RunStats::default(),
            used_full_data: false,
            init_ms: 0.0,
            refine_ms: 0.0,
            total_ms: ms(start),
        });
    }

    let (state, stats, initial_td, used_full_data, init_ms, refine_ms) = match config.algorithm {
        Algorithm::Clara | Algorithm::FastClara => {
            let r = clara(matrix, k, &config.clara_config())?;
            (r.state, r.stats.clone(), r.stats.initial_td, r.used_full_data, 0.0, ms(start))
        }
        Algorithm::Clarans | Algorithm::FastClarans => {
            let r = clarans(matrix, k, &config.clarans_config())?;
            (r.state, r.stats.clone(), r.stats.initial_td, false, 0.0, ms(start))
        }
        alg => {
            let mark = CounterMark::take(matrix);
            let mut state: MedoidState = initialize(matrix, k, &config.init_config())?;
            let mut cache = rebuild_cache(matrix, &state);
            let initial_td = state.td();
            let init_ms = ms(start);
            let t = Instant::now();
            let mut stats = match alg.swap_engine() {
                Some(engine) => refine(matrix, &mut state, &mut cache, &config.swap_config(engine))?,
                None => parkjun_refine(matrix, &mut state, &mut cache)?,
            };
            let refine_ms = ms(t);
            // report lookups for the whole run, initialization included
            stats.lookups = 0;
            stats.distance_evals = 0;
            mark.settle(matrix, &mut stats);
            (state, stats, initial_td, false, init_ms, refine_ms)
        }
    };
    let cache = rebuild_cache(matrix, &state);
    Ok(RunOutput {
        medoids: state.medoids().to_vec(),
        assignment: cache.nearest,
        td: state.td(),
        initial_td,
        stats,
        used_full_data,
        init_ms,
        refine_ms,
        total_ms: ms(start),
    })
}
