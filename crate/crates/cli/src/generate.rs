use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use fastpam::rng::RNG_NAME;
use fastpam::synth::{gaussian_mixture, MixtureSpec};

use crate::io;
use crate::Failure;

#[derive(Args)]
pub struct GenerateArgs {
    /// Number of objects.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub clusters: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Per-coordinate standard deviation within a cluster.
    #[arg(long, default_value_t = 0.5)]
    pub spread: f64,
    /// Cluster centers are drawn uniformly from [0, box-size)^dim.
    #[arg(long, default_value_t = 10.0)]
    pub box_size: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Append the true cluster label as a last column.
    #[arg(long)]
    pub labels: bool,
    /// Output file [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: GenerateArgs) -> Result<(), Failure> {
    let spec = MixtureSpec {
        clusters: args.clusters,
        dim: args.dim,
        spread: args.spread,
        n: args.n,
        seed: args.seed,
        box_size: args.box_size,
    };
    let mixture = gaussian_mixture(&spec)?;
    let mut w = io::output(args.output.as_deref())?;
    writeln!(
        w,
        "# gaussian mixture: n={} clusters={} dim={} spread={} box_size={} seed={} labels={} rng={RNG_NAME} fastpam {}",
        spec.n,
        spec.clusters,
        spec.dim,
        spec.spread,
        spec.box_size,
        spec.seed,
        args.labels,
        env!("CARGO_PKG_VERSION")
    )?;
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
    for (row, &label) in mixture.data.rows().zip(&mixture.labels) {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if args.labels {
            fields.push(label.to_string());
        }
        out.write_record(&fields)?;
    }
    out.flush()?;
    Ok(())
}
