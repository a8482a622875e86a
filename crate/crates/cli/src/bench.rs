use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use fastpam::rng::RNG_NAME;
use fastpam::synth::{gaussian_mixture, MixtureSpec};
use fastpam::{build_matrix, run as run_algorithm, Algorithm, Counted, Dataset, Dissimilarity, DissimilarityMatrix, Metric, RunOutput, VectorSpace};
use serde::{Deserialize, Serialize};

use crate::io;
use crate::options::AlgoOptions;
use crate::Failure;

#[derive(Args)]
pub struct BenchArgs {
    /// JSON experiment spec.
    pub spec: PathBuf,
    /// Directory for records.csv and summary.csv.
    #[arg(long, default_value = ".")]
    pub output: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum DatasetSpec {
    GaussianMixture(MixtureSpec),
    /// Vectors, relative to the spec file.
    Csv(PathBuf),
    /// Triangular matrix file, relative to the spec file.
    Matrix(PathBuf),
}

fn default_metric() -> Metric {
    Metric::Euclidean
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchSpec {
    dataset: DatasetSpec,
    #[serde(default = "default_metric")]
    metric: Metric,
    algorithms: Vec<AlgoOptions>,
    k_values: Vec<usize>,
    #[serde(default = "one")]
    repeats: usize,
    #[serde(default)]
    seed_base: u64,
    #[serde(default)]
    count_lookups: bool,
    #[serde(default)]
    matrix_free: bool,
    /// Metrics summarized in summary.csv [default: all].
    #[serde(default)]
    metrics: Option<Vec<String>>,
}

const METRICS: [&str; 10] = [
    "final_td",
    "initial_td",
    "iterations",
    "swaps_executed",
    "candidate_evaluations",
    "slot_updates",
    "lookups",
    "distance_evals",
    "wall_time_ms",
    "swap_time_ms",
];

#[derive(Debug, Serialize)]
struct Record {
    combo: String,
    engine: Algorithm,
    init: String,
    k: usize,
    n: usize,
    repeat: usize,
    seed: u64,
    status: &'static str,
    error: String,
    final_td: Option<f64>,
    initial_td: Option<f64>,
    iterations: Option<usize>,
    swaps_executed: Option<usize>,
    candidate_evaluations: Option<u64>,
    slot_updates: Option<u64>,
    lookups: Option<u64>,
    distance_evals: Option<u64>,
    wall_time_ms: Option<f64>,
    swap_time_ms: Option<f64>,
}

impl Record {
    fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "final_td" => self.final_td,
            "initial_td" => self.initial_td,
            "iterations" => self.iterations.map(|v| v as f64),
            "swaps_executed" => self.swaps_executed.map(|v| v as f64),
            "candidate_evaluations" => self.candidate_evaluations.map(|v| v as f64),
            "slot_updates" => self.slot_updates.map(|v| v as f64),
            "lookups" => self.lookups.map(|v| v as f64),
            "distance_evals" => self.distance_evals.map(|v| v as f64),
            "wall_time_ms" => self.wall_time_ms,
            "swap_time_ms" => self.swap_time_ms,
            _ => None,
        }
    }
}

enum Source {
    Matrix(DissimilarityMatrix),
    Vectors(Dataset),
}

fn load(spec: &BenchSpec, base: &Path) -> Result<Source, Failure> {
    let data = match &spec.dataset {
        DatasetSpec::Matrix(p) => {
            if spec.metric != Metric::Precomputed || spec.matrix_free {
                return Err(Failure::Usage("a matrix dataset needs metric \"precomputed\" and no matrix_free".into()));
            }
            return Ok(Source::Matrix(io::read_matrix(&base.join(p))?));
        }
        _ if spec.metric == Metric::Precomputed => {
            return Err(Failure::Usage("metric \"precomputed\" needs a matrix dataset".into()))
        }
        DatasetSpec::Csv(p) => io::read_dataset(&base.join(p))?,
        DatasetSpec::GaussianMixture(m) => gaussian_mixture(m)?.data,
    };
    if spec.matrix_free {
        Ok(Source::Vectors(data))
    } else {
        Ok(Source::Matrix(build_matrix(&data, spec.metric)?))
    }
}

fn execute<D: Dissimilarity>(d: &D, k: usize, opts: &AlgoOptions, seed: u64, count: bool) -> fastpam::Result<RunOutput> {
    let config = opts.run_config(seed);
    if count {
        run_algorithm(&Counted::new(d), k, &config)
    } else {
        run_algorithm(d, k, &config)
    }
}

/// Combo labels, made unique by a numeric suffix where two entries collide.
fn labels(algorithms: &[AlgoOptions]) -> Vec<String> {
    let base: Vec<String> = algorithms.iter().map(AlgoOptions::label).collect();
    base.iter()
        .enumerate()
        .map(|(i, l)| if base.iter().filter(|b| *b == l).count() > 1 { format!("{l}#{}", i + 1) } else { l.clone() })
        .collect()
}

fn stats(values: &[f64]) -> [Option<f64>; 3] {
    if values.is_empty() {
        return [None; 3];
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [Some(mean), Some(min), Some(max)]
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_summary(path: &Path, records: &[Record], metrics: &[String]) -> Result<(), Failure> {
    // (k, combo) in first-seen order
    let mut groups: Vec<(usize, String)> = Vec::new();
    for r in records {
        if !groups.iter().any(|(k, c)| *k == r.k && *c == r.combo) {
            groups.push((r.k, r.combo.clone()));
        }
    }
    let mean_work = |k: usize, combo: &str| {
        let v: Vec<f64> =
            records.iter().filter(|r| r.k == k && r.combo == combo).filter_map(|r| r.metric("slot_updates")).collect();
        stats(&v)[0]
    };
    let mut pam_work: BTreeMap<usize, f64> = BTreeMap::new();
    for (k, combo) in &groups {
        let is_pam = records.iter().any(|r| r.combo == *combo && r.engine == Algorithm::Pam);
        if is_pam && !pam_work.contains_key(k) {
            if let Some(w) = mean_work(*k, combo) {
                pam_work.insert(*k, w);
            }
        }
    }

    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["combo".to_string(), "engine".into(), "init".into(), "k".into(), "runs".into(), "failed".into()];
    for m in metrics {
        header.extend(["mean_", "min_", "max_"].iter().map(|p| format!("{p}{m}")));
    }
    header.push("speedup_vs_pam".into());
    w.write_record(&header)?;
    for (k, combo) in &groups {
        let rows: Vec<&Record> = records.iter().filter(|r| r.k == *k && r.combo == *combo).collect();
        let failed = rows.iter().filter(|r| r.status != "ok").count();
        let mut line =
            vec![combo.clone(), rows[0].engine.to_string(), rows[0].init.clone(), k.to_string(), rows.len().to_string(), failed.to_string()];
        for m in metrics {
            let v: Vec<f64> = rows.iter().filter_map(|r| r.metric(m)).collect();
            line.extend(stats(&v).into_iter().map(cell));
        }
        let speedup = match (pam_work.get(k), mean_work(*k, combo)) {
            (Some(p), Some(c)) if c > 0.0 => Some(p / c),
            _ => None,
        };
        line.push(cell(speedup));
        w.write_record(&line)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: BenchArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.spec).map_err(|e| Failure::Run(format!("{}: {e}", args.spec.display())))?;
    let spec: BenchSpec =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: invalid spec: {e}", args.spec.display())))?;
    if spec.algorithms.is_empty() || spec.k_values.is_empty() || spec.repeats == 0 {
        return Err(Failure::Usage("spec needs at least one algorithm, one k and repeats >= 1".into()));
    }
    for a in &spec.algorithms {
        a.validate()?;
    }
    let metrics: Vec<String> = match &spec.metrics {
        Some(list) => {
            if let Some(bad) = list.iter().find(|m| !METRICS.contains(&m.as_str())) {
                return Err(Failure::Usage(format!("unknown metric '{bad}', expected one of {}", METRICS.join(", "))));
            }
            list.clone()
        }
        None => METRICS.iter().map(|s| s.to_string()).collect(),
    };
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let source = load(&spec, base)?;
    fs::create_dir_all(&args.output)?;

    let names = labels(&spec.algorithms);
    let mut records = Vec::new();
    for &k in &spec.k_values {
        for (opts, combo) in spec.algorithms.iter().zip(&names) {
            for repeat in 0..spec.repeats {
                let seed = spec.seed_base + repeat as u64;
                let start = Instant::now();
                let (n, result) = match &source {
                    Source::Matrix(m) => (m.len(), execute(m, k, opts, seed, spec.count_lookups)),
                    Source::Vectors(data) => {
                        let space = VectorSpace::new(data, spec.metric)?;
                        (data.len(), execute(&space, k, opts, seed, spec.count_lookups))
                    }
                };
                let wall = start.elapsed().as_secs_f64() * 1e3;
                let mut rec = Record {
                    combo: combo.clone(),
                    engine: opts.engine,
                    init: opts.effective_init().to_string(),
                    k,
                    n,
                    repeat,
                    seed,
                    status: "ok",
                    error: String::new(),
                    final_td: None,
                    initial_td: None,
                    iterations: None,
                    swaps_executed: None,
                    candidate_evaluations: None,
                    slot_updates: None,
                    lookups: None,
                    distance_evals: None,
                    wall_time_ms: Some(wall),
                    swap_time_ms: None,
                };
                match result {
                    Ok(out) => {
                        rec.final_td = Some(out.td);
                        rec.initial_td = Some(out.initial_td);
                        rec.iterations = Some(out.stats.iterations);
                        rec.swaps_executed = Some(out.stats.swaps_executed);
                        rec.candidate_evaluations = Some(out.stats.candidate_evaluations);
                        rec.slot_updates = Some(out.stats.inner_work);
                        rec.lookups = spec.count_lookups.then_some(out.stats.lookups);
                        rec.distance_evals = spec.matrix_free.then_some(out.stats.distance_evals);
                        rec.swap_time_ms = Some(out.refine_ms);
                    }
                    Err(e) => {
                        eprintln!("{combo} k={k} repeat={repeat}: {e}");
                        rec.status = "failed";
                        rec.error = e.to_string();
                        rec.wall_time_ms = None;
                    }
                }
                records.push(rec);
            }
        }
    }

    let mut w = csv::Writer::from_path(args.output.join("records.csv"))?;
    for r in &records {
        w.serialize(r)?;
    }
    w.flush()?;
    write_summary(&args.output.join("summary.csv"), &records, &metrics)?;
    eprintln!("{} runs, rng {RNG_NAME}", records.len());

    let failed = records.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        return Err(Failure::Run(format!("{failed} of {} runs failed", records.len())));
    }
    Ok(())
}
