use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mse, normalized_mse, support_recovered};
use super::spec::{ExperimentSpec, Family};
use crate::channels::OutputChannel;
use crate::error::{Error, Result};
use crate::model::{
    gen_binary_signal, gen_signal, measure, seeded_rng, EnsembleKind, EnsembleSpec, ProblemInstance,
};
use crate::priors::PriorParams;
use crate::solvers::{solve, Algorithm, SolveConfig, SolveStatus};

/// Decision threshold on the estimate for exact support recovery.
pub const SUPPORT_THRESHOLD: f64 = 0.5;

/// One grid point of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    pub final_mse: f64,
    pub normalized_mse: f64,
    pub iterations: usize,
    pub seconds: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub cell: Cell,
    pub trial: usize,
    pub seed: u64,
    /// One entry per configured algorithm, in configuration order.
    pub outcomes: Vec<AlgorithmOutcome>,
}

impl TrialResult {
    pub fn outcome(&self, algorithm: Algorithm) -> Option<&AlgorithmOutcome> {
        self.outcomes.iter().find(|o| o.algorithm == algorithm)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in cell `cell`; independent of execution order.
pub fn child_seed(base_seed: u64, cell: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ cell as u64) ^ trial as u64)
}

fn rows_for(n: usize, alpha: f64) -> usize {
    ((alpha * n as f64).round() as usize).max(1)
}

/// Grid points of the experiment, in output order.
pub fn cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let n = spec.n;
    let base = |index, m: usize| Cell {
        index,
        n,
        m,
        alpha: m as f64 / n as f64,
        gamma: None,
        eta: None,
        k: None,
    };
    match spec.family {
        Family::GammaSweep => spec
            .gammas
            .iter()
            .enumerate()
            .map(|(i, &g)| Cell { gamma: Some(g), ..base(i, rows_for(n, spec.alpha)) })
            .collect(),
        Family::EtaSweep => spec
            .etas
            .iter()
            .enumerate()
            .map(|(i, &e)| Cell { eta: Some(e), ..base(i, rows_for(n, spec.alpha)) })
            .collect(),
        Family::PoolingPhase => spec
            .ms
            .iter()
            .flat_map(|&m| spec.ks.iter().map(move |&k| (m, k)))
            .enumerate()
            .map(|(i, (m, k))| Cell { k: Some(k), ..base(i, m) })
            .collect(),
        Family::OnebitAlphaSweep => spec
            .alphas
            .iter()
            .enumerate()
            .map(|(i, &a)| Cell { gamma: Some(spec.gamma), ..base(i, rows_for(n, a)) })
            .collect(),
        Family::Timing => spec
            .ns
            .iter()
            .enumerate()
            .map(|(i, &nn)| {
                let m = rows_for(nn, spec.alpha);
                Cell { index: i, n: nn, m, alpha: m as f64 / nn as f64, gamma: None, eta: None, k: None }
            })
            .collect(),
    }
}

/// Generates the problem of one trial from its seed.
pub fn build_instance(spec: &ExperimentSpec, cell: &Cell, seed: u64) -> Result<ProblemInstance> {
    let mut rng = seeded_rng(seed);
    let (n, m) = (cell.n, cell.m);
    let gaussian_prior = || PriorParams::new(spec.rho, spec.prior_mean, spec.prior_var);
    let (kind, prior, channel) = match spec.family {
        Family::GammaSweep => (
            EnsembleKind::GaussianIid { gamma: cell.gamma.unwrap_or(0.0) },
            gaussian_prior()?,
            OutputChannel::awgn(spec.delta)?,
        ),
        Family::EtaSweep => (
            EnsembleKind::LowRank { eta: cell.eta.unwrap_or(1.0) },
            gaussian_prior()?,
            OutputChannel::awgn(spec.delta)?,
        ),
        Family::PoolingPhase => {
            let k = cell.k.unwrap_or(0);
            (
                EnsembleKind::Pooling { row_weight: spec.row_weight, balanced: spec.balanced_pools },
                PriorParams::new(k as f64 / n as f64, spec.prior_mean, spec.prior_var)?,
                OutputChannel::awgn(spec.delta)?,
            )
        }
        Family::OnebitAlphaSweep => (
            EnsembleKind::GaussianIid { gamma: cell.gamma.unwrap_or(spec.gamma) },
            gaussian_prior()?,
            OutputChannel::Sign,
        ),
        Family::Timing => (
            EnsembleKind::SparseGaussian { density: spec.density },
            gaussian_prior()?,
            OutputChannel::awgn(spec.delta)?,
        ),
    };
    let matrix = EnsembleSpec { kind, m, n, seed }.generate_with(&mut rng)?;
    let x = match spec.family {
        Family::PoolingPhase => gen_binary_signal(n, cell.k.unwrap_or(0), &mut rng)?,
        _ => gen_signal(n, &prior, &mut rng)?,
    };
    let y = measure(&matrix, &x, &channel, &mut rng)?;
    Ok(ProblemInstance::new(matrix, y, Some(x), channel, prior)?.with_seed(seed))
}

fn run_trial(spec: &ExperimentSpec, cell: &Cell, trial: usize) -> Result<TrialResult> {
    let seed = child_seed(spec.base_seed, cell.index, trial);
    let inst = build_instance(spec, cell, seed)?;
    let x = inst.x_true.as_deref().ok_or_else(|| Error::Config("missing truth".into()))?;
    let mut outcomes = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let config = SolveConfig {
            algorithm,
            t_max: spec.t_max,
            epsilon: spec.epsilon,
            seed,
            ..SolveConfig::default()
        };
        let report = solve(&inst, &config)?;
        let final_mse = mse(&report.x_mean, x)?;
        let normalized = normalized_mse(&report.x_mean, x)?;
        let success = match spec.family {
            Family::PoolingPhase => support_recovered(&report.x_mean, x, SUPPORT_THRESHOLD)?,
            Family::OnebitAlphaSweep => report.status == SolveStatus::Converged,
            _ => final_mse < spec.success_mse,
        };
        outcomes.push(AlgorithmOutcome {
            algorithm,
            status: report.status,
            final_mse,
            normalized_mse: normalized,
            iterations: report.iterations,
            seconds: report.elapsed_seconds(),
            success,
        });
    }
    Ok(TrialResult {
        cell: *cell,
        trial,
        seed,
        outcomes,
    })
}

/// Runs every trial of one cell. Trials may execute concurrently; results
/// come back in trial order.
pub fn run_cell(spec: &ExperimentSpec, cell: &Cell) -> Result<Vec<TrialResult>> {
    (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, cell, t))
        .collect()
}

/// Runs all cells, calling `progress` after each one.
pub fn run_experiment<F>(spec: &ExperimentSpec, mut progress: F) -> Result<Vec<TrialResult>>
where
    F: FnMut(&Cell, &[TrialResult]),
{
    spec.validate()?;
    if spec.family == Family::Timing {
        return Err(Error::Config("timing experiments run through timing_benchmark".into()));
    }
    let mut out = Vec::new();
    for cell in cells(spec) {
        let rows = run_cell(spec, &cell)?;
        progress(&cell, &rows);
        out.extend(rows);
    }
    Ok(out)
}
