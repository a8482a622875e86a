use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use fastpam::{build_matrix, save_matrix, DissimilarityMatrix, Metric};

use crate::io;
use crate::options::metric_parser;
use crate::Failure;

#[derive(Args)]
pub struct ConvertArgs {
    /// CSV of vectors, or a square n-by-n CSV matrix with --metric precomputed.
    pub input: PathBuf,
    #[arg(long, default_value = "euclidean", value_parser = metric_parser())]
    pub metric: Metric,
    /// Output file [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Checks a square table for symmetry and a zero diagonal.
fn square_matrix(rows: &[Vec<f64>]) -> Result<DissimilarityMatrix, Failure> {
    let n = rows.len();
    if rows[0].len() != n {
        return Err(Failure::Run(format!("precomputed input must be square, found {n} rows of {} columns", rows[0].len())));
    }
    for i in 0..n {
        if rows[i][i] != 0.0 {
            return Err(Failure::Run(format!("diagonal entry ({i}, {i}) is {}, expected 0", rows[i][i])));
        }
        for j in 0..i {
            let (a, b) = (rows[i][j], rows[j][i]);
            if a < 0.0 {
                return Err(Failure::Run(format!("entry ({i}, {j}) is negative: {a}")));
            }
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                return Err(Failure::Run(format!("matrix is not symmetric at ({i}, {j}): {a} vs {b}")));
            }
        }
    }
    Ok(DissimilarityMatrix::from_fn(n, |i, j| rows[i][j])?)
}

pub fn run(args: ConvertArgs) -> Result<(), Failure> {
    let matrix = if args.metric == Metric::Precomputed {
        square_matrix(&io::read_table(&args.input)?)?
    } else {
        build_matrix(&io::read_dataset(&args.input)?, args.metric)?
    };
    let mut w = io::output(args.output.as_deref())?;
    save_matrix(&matrix, &mut w)?;
    w.flush()?;
    Ok(())
}
