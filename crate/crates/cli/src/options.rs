//! Algorithm options shared by `cluster` flags and `bench` spec entries.

use clap::builder::PossibleValuesParser;
use clap::builder::TypedValueParser as _;
use clap::Args;
use fastpam::{Algorithm, InitMethod, Metric, RunConfig};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const ENGINES: [&str; 9] =
    ["pam", "reynolds", "fastpam1", "fastpam2", "parkjun", "clara", "fastclara", "clarans", "fastclarans"];
pub const INITS: [&str; 5] = ["build", "lab", "kmeanspp", "random", "parkjun"];
pub const METRICS: [&str; 4] = ["euclidean", "sqeuclidean", "manhattan", "precomputed"];

pub fn engine_parser() -> impl clap::builder::TypedValueParser<Value = Algorithm> {
    PossibleValuesParser::new(ENGINES).map(|s| s.parse::<Algorithm>().expect("listed engine"))
}

pub fn init_parser() -> impl clap::builder::TypedValueParser<Value = InitMethod> {
    PossibleValuesParser::new(INITS).map(|s| s.parse::<InitMethod>().expect("listed init"))
}

pub fn metric_parser() -> impl clap::builder::TypedValueParser<Value = Metric> {
    PossibleValuesParser::new(METRICS).map(|s| s.parse::<Metric>().expect("listed metric"))
}

/// One algorithm configuration. Unset options take the engine's defaults.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoOptions {
    /// Refinement engine or sampling meta-algorithm.
    #[arg(long, default_value = "fastpam2", value_parser = engine_parser())]
    pub engine: Algorithm,
    /// Initialization [default: build; lab for fastclara, parkjun for parkjun].
    #[arg(long, value_parser = init_parser())]
    #[serde(default)]
    pub init: Option<InitMethod>,
    /// FastPAM2 recheck tolerance: 1 strict, 0 greedy.
    #[arg(long, value_parser = PossibleValuesParser::new(["0", "1"]).map(|s| if s == "1" { 1.0 } else { 0.0 }))]
    #[serde(default)]
    pub tau: Option<f64>,
    /// CLARA subsample size [default: 40 + 2k].
    #[arg(long)]
    #[serde(default)]
    pub sample_size: Option<usize>,
    /// CLARA subsamples [default: 5].
    #[arg(long)]
    #[serde(default)]
    pub restarts: Option<usize>,
    /// CLARANS consecutive failed draws per local search
    /// [default: max(1.25% of k(n-k), 250), divided by k for fastclarans].
    #[arg(long)]
    #[serde(default)]
    pub attempts: Option<usize>,
    /// CLARANS local searches [default: 2].
    #[arg(long)]
    #[serde(default)]
    pub numlocal: Option<usize>,
    /// Stop refinement after this many iterations (0 = until converged).
    #[arg(long)]
    #[serde(default)]
    pub max_iter: Option<usize>,
}

fn is_clara(a: Algorithm) -> bool {
    matches!(a, Algorithm::Clara | Algorithm::FastClara)
}

fn is_clarans(a: Algorithm) -> bool {
    matches!(a, Algorithm::Clarans | Algorithm::FastClarans)
}

impl AlgoOptions {
    /// Rejects options that the chosen engine would silently ignore.
    pub fn validate(&self) -> Result<(), Failure> {
        let e = self.engine;
        let reject = |flag: &str, valid: &str| Err(Failure::Usage(format!("--{flag} only applies to {valid}, not {e}")));
        if self.tau.is_some() && !matches!(e, Algorithm::FastPam2 | Algorithm::FastClara) {
            return reject("tau", "fastpam2 and fastclara");
        }
        if (self.sample_size.is_some() || self.restarts.is_some()) && !is_clara(e) {
            return reject(if self.sample_size.is_some() { "sample-size" } else { "restarts" }, "clara and fastclara");
        }
        if (self.attempts.is_some() || self.numlocal.is_some()) && !is_clarans(e) {
            return reject(if self.attempts.is_some() { "attempts" } else { "numlocal" }, "clarans and fastclarans");
        }
        if is_clarans(e) && self.init.is_some_and(|i| i != InitMethod::Random) {
            return Err(Failure::Usage(format!("{e} always starts from random medoids; --init is not supported")));
        }
        if self.max_iter.is_some() && is_clarans(e) {
            return reject("max-iter", "the swap engines and clara");
        }
        Ok(())
    }

    pub fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig {
            init: self.init,
            tau: self.tau.unwrap_or(0.0),
            max_iter: self.max_iter.unwrap_or(0),
            sample_size: self.sample_size,
            restarts: self.restarts,
            attempts: self.attempts,
            numlocal: self.numlocal,
            ..RunConfig::new(self.engine, seed)
        }
    }

    /// Initialization that will actually run.
    pub fn effective_init(&self) -> InitMethod {
        self.run_config(0).init_config().method
    }

    /// Short label such as `fastpam2+lab`.
    pub fn label(&self) -> String {
        format!("{}+{}", self.engine, self.effective_init())
    }
}
