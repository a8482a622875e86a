use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use fastpam::rng::RNG_NAME;
use fastpam::{build_matrix, run as run_algorithm, Counted, Dissimilarity, Metric, RunConfig, RunOutput, RunStats, VectorSpace};
use serde::Serialize;

use crate::io;
use crate::options::{metric_parser, AlgoOptions};
use crate::Failure;

#[derive(Args)]
pub struct ClusterArgs {
    /// CSV of n rows by d numeric columns, or a triangular matrix file with --metric precomputed.
    pub input: PathBuf,
    /// Number of medoids.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "euclidean", value_parser = metric_parser())]
    pub metric: Metric,
    #[command(flatten)]
    pub algo: AlgoOptions,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Count dissimilarity lookups.
    #[arg(long)]
    pub count_lookups: bool,
    /// Compute distances on demand instead of building the full matrix.
    #[arg(long)]
    pub matrix_free: bool,
    /// Include the executed swaps in the output.
    #[arg(long)]
    pub trace: bool,
    /// Output file [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct ConfigEcho {
    input: String,
    metric: Metric,
    k: usize,
    engine: fastpam::Algorithm,
    init: fastpam::InitMethod,
    seed: u64,
    tau: Option<f64>,
    sample_size: Option<usize>,
    restarts: Option<usize>,
    attempts: Option<usize>,
    numlocal: Option<usize>,
    max_iter: Option<usize>,
    count_lookups: bool,
    matrix_free: bool,
    rng: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct Timings {
    matrix_ms: f64,
    init_ms: f64,
    refine_ms: f64,
    total_ms: f64,
}

#[derive(Serialize)]
struct ClusterResult {
    n: usize,
    k: usize,
    medoids: Vec<usize>,
    /// Slot of each object's medoid in `medoids`.
    assignment: Vec<usize>,
    td: f64,
    initial_td: f64,
    used_full_data: bool,
    stats: RunStats,
    timing_ms: Timings,
    config: ConfigEcho,
}

fn execute<D: Dissimilarity>(matrix: &D, k: usize, config: &RunConfig, count: bool) -> fastpam::Result<RunOutput> {
    if count {
        run_algorithm(&Counted::new(matrix), k, config)
    } else {
        run_algorithm(matrix, k, config)
    }
}

pub fn run(args: ClusterArgs) -> Result<(), Failure> {
    args.algo.validate()?;
    if args.matrix_free && args.metric == Metric::Precomputed {
        return Err(Failure::Usage("--matrix-free needs vector input, not --metric precomputed".into()));
    }
    let mut config = args.algo.run_config(args.seed);
    config.trace = args.trace;

    let start = Instant::now();
    let (out, n, matrix_ms) = if args.metric == Metric::Precomputed {
        let m = io::read_matrix(&args.input)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        (execute(&m, args.k, &config, args.count_lookups)?, m.len(), ms)
    } else {
        let data = io::read_dataset(&args.input)?;
        if args.matrix_free {
            let space = VectorSpace::new(&data, args.metric)?;
            (execute(&space, args.k, &config, args.count_lookups)?, data.len(), 0.0)
        } else {
            let m = build_matrix(&data, args.metric)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            (execute(&m, args.k, &config, args.count_lookups)?, data.len(), ms)
        }
    };

    let result = ClusterResult {
        n,
        k: args.k,
        medoids: out.medoids,
        assignment: out.assignment,
        td: out.td,
        initial_td: out.initial_td,
        used_full_data: out.used_full_data,
        stats: out.stats,
        timing_ms: Timings { matrix_ms, init_ms: out.init_ms, refine_ms: out.refine_ms, total_ms: out.total_ms },
        config: ConfigEcho {
            input: args.input.display().to_string(),
            metric: args.metric,
            k: args.k,
            engine: args.algo.engine,
            init: args.algo.effective_init(),
            seed: args.seed,
            tau: args.algo.tau,
            sample_size: args.algo.sample_size,
            restarts: args.algo.restarts,
            attempts: args.algo.attempts,
            numlocal: args.algo.numlocal,
            max_iter: args.algo.max_iter,
            count_lookups: args.count_lookups,
            matrix_free: args.matrix_free,
            rng: RNG_NAME,
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    let mut w = io::output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &result)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
