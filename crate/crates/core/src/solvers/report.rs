use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::rbp::{RbpSolver, Schedule};
use super::Solver;
use crate::error::{Error, Result};
use crate::harness::mse;
use crate::model::{seeded_rng, ProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Relaxed belief propagation.
    Rbp,
    /// Parallel AMP, AWGN channel.
    Amp,
    /// Swept AMP, AWGN channel.
    Swamp,
    /// Swept AMP with a generic output channel.
    Gswamp,
    /// Parallel AMP with a generic output channel.
    Gamp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Rbp,
        Algorithm::Amp,
        Algorithm::Swamp,
        Algorithm::Gswamp,
        Algorithm::Gamp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Rbp => "rbp",
            Algorithm::Amp => "amp",
            Algorithm::Swamp => "swamp",
            Algorithm::Gswamp => "gswamp",
            Algorithm::Gamp => "gamp",
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
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub algorithm: Algorithm,
    pub t_max: usize,
    /// Stop once `mean |a^new - a^old|` falls below this.
    pub epsilon: f64,
    pub seed: u64,
    /// Update order for relaxed BP; the AMP-family engines have fixed orders.
    pub schedule: Schedule,
    /// Overrides [`default_divergence_threshold`](super::default_divergence_threshold).
    pub divergence_threshold: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            algorithm: Algorithm::Swamp,
            t_max: 1000,
            epsilon: 1e-8,
            seed: 0,
            schedule: Schedule::RandomSequential,
            divergence_threshold: None,
        }
    }
}

impl SolveConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolveConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(Error::Config("t_max must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if let Some(t) = self.divergence_threshold {
            if !(t > 0.0) {
                return Err(Error::Config("divergence threshold must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Diverged,
}

impl SolveStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::Diverged => "diverged",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub mean_abs_delta_a: f64,
    pub mse: Option<f64>,
    /// Wall time since the solve started.
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    pub x_mean: Vec<f64>,
    pub x_var: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_mse: Option<f64>,
    pub seed: u64,
}

impl SolveReport {
    pub fn final_mse(&self) -> Option<f64> {
        self.trace.last().and_then(|r| r.mse)
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.trace.last().map_or(0.0, |r| r.elapsed_seconds)
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            algorithm: self.algorithm,
            status: self.status,
            iterations: self.iterations,
            final_mse: self.final_mse(),
            seed: self.seed,
        }
    }

    /// CSV with columns `iter, mean_abs_delta_a, mse, elapsed_seconds`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "mean_abs_delta_a", "mse", "elapsed_seconds"])?;
        for r in &self.trace {
            w.write_record([
                r.iter.to_string(),
                format!("{:e}", r.mean_abs_delta_a),
                r.mse.map(|v| format!("{v:e}")).unwrap_or_default(),
                format!("{:.6}", r.elapsed_seconds),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV with columns `algorithm, status, iterations, final_mse, seed`.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "status", "iterations", "final_mse", "seed"])?;
        w.write_record([
            self.algorithm.name().to_string(),
            self.status.name().to_string(),
            self.iterations.to_string(),
            self.final_mse().map(|v| format!("{v:e}")).unwrap_or_default(),
            self.seed.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }
}

/// Iterates the configured algorithm until the mean absolute change of the
/// estimate drops below `epsilon`, the iterate diverges, or `t_max`
/// iterations have run. Divergence is reported through the status.
pub fn solve(instance: &ProblemInstance, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    instance.validate()?;
    let mut rng = seeded_rng(config.seed);
    let start = Instant::now();
    let mut trace = Vec::new();
    let record = |trace: &mut Vec<TraceRow>, delta: f64, a: &[f64]| -> Result<()> {
        let err = match &instance.x_true {
            Some(x) => Some(mse(a, x)?),
            None => None,
        };
        trace.push(TraceRow {
            iter: trace.len() + 1,
            mean_abs_delta_a: delta,
            mse: err,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
        Ok(())
    };

    let mut status = SolveStatus::MaxIters;
    let (x_mean, x_var) = if config.algorithm == Algorithm::Rbp {
        let solver = RbpSolver::new(instance)?;
        let mut st = solver.init();
        let (mut a, mut v) = solver.marginals(&st);
        let threshold = config
            .divergence_threshold
            .unwrap_or_else(|| super::default_divergence_threshold(&instance.prior));
        for _ in 0..config.t_max {
            if solver.step(&mut st, config.schedule, &mut rng).is_err() {
                record(&mut trace, f64::INFINITY, &a)?;
                status = SolveStatus::Diverged;
                break;
            }
            let (na, nv) = solver.marginals(&st);
            let delta = na.iter().zip(&a).map(|(p, q)| (p - q).abs()).sum::<f64>() / na.len() as f64;
            a = na;
            v = nv;
            record(&mut trace, delta, &a)?;
            let ms = a.iter().map(|x| x * x).sum::<f64>() / a.len() as f64;
            if !delta.is_finite() || ms > threshold {
                status = SolveStatus::Diverged;
                break;
            }
            if delta < config.epsilon {
                status = SolveStatus::Converged;
                break;
            }
        }
        (a, v)
    } else {
        let mut solver = Solver::new(instance);
        if let Some(t) = config.divergence_threshold {
            solver = solver.with_divergence_threshold(t);
        }
        let mut st = solver.init_state();
        for _ in 0..config.t_max {
            match solver.step(config.algorithm, &mut st, &mut rng) {
                Ok(stats) => {
                    record(&mut trace, stats.mean_abs_delta, &st.x_mean)?;
                    if stats.mean_abs_delta < config.epsilon {
                        status = SolveStatus::Converged;
                        break;
                    }
                }
                Err(Error::Diverged(_)) => {
                    record(&mut trace, f64::INFINITY, &st.x_mean)?;
                    status = SolveStatus::Diverged;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        (st.x_mean, st.x_var)
    };

    Ok(SolveReport {
        algorithm: config.algorithm,
        status,
        iterations: trace.len(),
        trace,
        x_mean,
        x_var,
        seed: config.seed,
    })
}
