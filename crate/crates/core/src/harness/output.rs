use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::run::TrialResult;
use crate::error::Result;
use crate::solvers::Algorithm;

const CELL_COLUMNS: [&str; 9] = ["cell", "n", "m", "k", "gamma", "eta", "alpha", "trial", "seed"];
const OUTCOME_COLUMNS: [&str; 6] = ["status", "final_mse", "normalized_mse", "iterations", "seconds", "success"];

pub fn csv_header(algorithms: &[Algorithm]) -> Vec<String> {
    let mut h: Vec<String> = CELL_COLUMNS.iter().map(|s| s.to_string()).collect();
    for alg in algorithms {
        for col in OUTCOME_COLUMNS {
            h.push(format!("{}_{col}", alg.name()));
        }
    }
    h
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes one row per trial. Columns are the cell coordinates followed by
/// a fixed block per algorithm, in the order of `algorithms`.
pub fn write_results_csv<W: Write>(results: &[TrialResult], algorithms: &[Algorithm], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(algorithms))?;
    for r in results {
        let c = &r.cell;
        let mut rec = vec![
            c.index.to_string(),
            c.n.to_string(),
            c.m.to_string(),
            opt(c.k),
            opt(c.gamma),
            opt(c.eta),
            format!("{}", c.alpha),
            r.trial.to_string(),
            r.seed.to_string(),
        ];
        for alg in algorithms {
            match r.outcome(*alg) {
                Some(o) => rec.extend([
                    o.status.name().to_string(),
                    format!("{:e}", o.final_mse),
                    format!("{:e}", o.normalized_mse),
                    o.iterations.to_string(),
                    format!("{:.6}", o.seconds),
                    o.success.to_string(),
                ]),
                None => rec.extend(std::iter::repeat_n(String::new(), OUTCOME_COLUMNS.len())),
            }
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(results: &[TrialResult], algorithms: &[Algorithm], path: &Path) -> Result<()> {
    write_results_csv(results, algorithms, BufWriter::new(File::create(path)?))
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a T,
    pub seeds: Vec<u64>,
    /// Defaults the user did not choose explicitly, such as a missing seed.
    pub warnings: Vec<String>,
}

impl<'a, T: Serialize> Manifest<'a, T> {
    pub fn new(command: &'a str, config: &'a T, seeds: Vec<u64>) -> Self {
        Manifest {
            tool: "swamp",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seeds,
            warnings: Vec::new(),
        }
    }

    pub fn warn(mut self, message: impl Into<String>) -> Self {
        self.warnings.push(message.into());
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }
}
