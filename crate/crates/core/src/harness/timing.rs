use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::run::{build_instance, cells, child_seed};
use super::spec::{ExperimentSpec, Family};
use crate::error::{Error, Result};
use crate::model::seeded_rng;
use crate::solvers::{Algorithm, Solver};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub m: usize,
    pub algorithm: Algorithm,
    /// Iterations actually run; fewer than requested only after divergence.
    pub iterations: usize,
    pub seconds: f64,
    pub seconds_per_iteration: f64,
    /// Matrix entries touched per iteration.
    pub entries_per_iteration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    pub requested_iterations: usize,
    pub rows: Vec<TimingRow>,
    /// Least-squares slope of `ln(seconds per iteration)` against `ln N`.
    pub slopes: Vec<(Algorithm, f64)>,
}

impl TimingTable {
    pub fn slope(&self, algorithm: Algorithm) -> Option<f64> {
        self.slopes.iter().find(|(a, _)| *a == algorithm).map(|&(_, s)| s)
    }

    pub fn row(&self, n: usize, algorithm: Algorithm) -> Option<&TimingRow> {
        self.rows.iter().find(|r| r.n == n && r.algorithm == algorithm)
    }

    /// CSV: `n, m, algorithm, iterations, seconds, seconds_per_iteration,
    /// seconds_per_requested`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "m", "algorithm", "iterations", "seconds", "seconds_per_iteration", "seconds_per_requested"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.m.to_string(),
                r.algorithm.name().to_string(),
                r.iterations.to_string(),
                format!("{:.6}", r.seconds),
                format!("{:e}", r.seconds_per_iteration),
                format!("{:.6}", r.seconds_per_iteration * self.requested_iterations as f64),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Times `spec.iterations` iterations of each algorithm for every `N` in
/// the grid. Runs are sequential so timings do not interfere.
pub fn timing_benchmark(spec: &ExperimentSpec) -> Result<TimingTable> {
    spec.validate()?;
    if spec.family != Family::Timing {
        return Err(Error::Config("timing_benchmark needs the timing family".into()));
    }
    let mut rows = Vec::new();
    for cell in cells(spec) {
        let seed = child_seed(spec.base_seed, cell.index, 0);
        let inst = build_instance(spec, &cell, seed)?;
        let solver = Solver::new(&inst);
        for &algorithm in &spec.algorithms {
            let mut st = solver.init_state();
            let mut rng = seeded_rng(seed);
            let mut done = 0;
            let mut entries = 0u64;
            let start = Instant::now();
            while done < spec.iterations {
                done += 1;
                match solver.step(algorithm, &mut st, &mut rng) {
                    Ok(stats) => entries += stats.entries_visited,
                    Err(Error::Diverged(_)) => break,
                    Err(e) => return Err(e),
                }
            }
            let seconds = start.elapsed().as_secs_f64();
            rows.push(TimingRow {
                n: cell.n,
                m: cell.m,
                algorithm,
                iterations: done,
                seconds,
                seconds_per_iteration: seconds / done as f64,
                entries_per_iteration: entries as f64 / done as f64,
            });
        }
    }
    let slopes = spec
        .algorithms
        .iter()
        .filter_map(|&alg| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| (r.n as f64, r.seconds_per_iteration))
                .collect();
            loglog_slope(&pts).map(|s| (alg, s))
        })
        .collect();
    Ok(TimingTable {
        requested_iterations: spec.iterations,
        rows,
        slopes,
    })
}
