use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use fastpam::{load_matrix, Dataset, DissimilarityMatrix};

use crate::Failure;

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

/// Reads a numeric CSV table. Lines starting with `#` are comments; a first
/// row that does not parse as numbers is taken as a header.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(open(path)?));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if i == 0 => continue,
            Err(_) => {
                let bad = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or_default();
                return Err(Failure::Run(format!("{}: line {line}: not a number: '{bad}'", path.display())));
            }
        };
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Failure::Run(format!("{}: line {line}: non-finite value {bad}", path.display())));
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Failure::Run(format!(
                    "{}: line {line}: expected {w} columns, found {}",
                    path.display(),
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::Run(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

pub fn read_dataset(path: &Path) -> Result<Dataset, Failure> {
    Ok(Dataset::from_rows(read_table(path)?)?)
}

/// Reads a triangular matrix file.
pub fn read_matrix(path: &Path) -> Result<DissimilarityMatrix, Failure> {
    load_matrix(BufReader::new(open(path)?)).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

/// Writer for `path`, or stdout when no path is given.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
