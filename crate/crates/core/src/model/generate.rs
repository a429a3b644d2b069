//! Random measurement ensembles, signals and the forward measurement.
//!
//! Every generator is a pure function of its arguments and the RNG state;
//! [`EnsembleSpec::generate`] seeds a ChaCha8 stream so that a spec plus a
//! seed fully determines the matrix.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, MeasurementMatrix, SparseMatrix};
use crate::channels::OutputChannel;
use crate::error::{ensure_finite, Error, Result};
use crate::priors::PriorParams;

/// Deterministic RNG for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("need M, N >= 1, got {m}x{n}")));
    }
    Ok(())
}

/// I.i.d. Gaussian entries with mean `gamma / n` and variance `1 / n`.
pub fn gen_gaussian_iid<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    check_dims(m, n)?;
    ensure_finite("gamma", gamma)?;
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
    }
    let mean = gamma / n as f64;
    let sd = (1.0 / n as f64).sqrt();
    let values = (0..m * n)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(DenseMatrix::from_row_major(m, n, values)?.into())
}

/// Inner dimension `round(eta * n)` of the low-rank ensemble.
pub fn lowrank_inner_dim(n: usize, eta: f64) -> Result<usize> {
    ensure_finite("eta", eta)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")));
    }
    let r = (eta * n as f64).round() as usize;
    if r == 0 {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} gives inner dimension 0 for N = {n}"
        )));
    }
    Ok(r)
}

/// `(1 / n) * P * Q` with `P` of size `m x r`, `Q` of size `r x n`, standard
/// Gaussian entries and `r = round(eta * n)`.
pub fn gen_lowrank<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    eta: f64,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    check_dims(m, n)?;
    let r = lowrank_inner_dim(n, eta)?;
    let p: Vec<f64> = (0..m * r).map(|_| rng.sample(StandardNormal)).collect();
    let q: Vec<f64> = (0..r * n).map(|_| rng.sample(StandardNormal)).collect();
    let scale = 1.0 / n as f64;
    let mut values = vec![0.0; m * n];
    for (row, out) in values.chunks_exact_mut(n).enumerate() {
        for k in 0..r {
            let pk = p[row * r + k] * scale;
            for (o, &qv) in out.iter_mut().zip(&q[k * n..(k + 1) * n]) {
                *o += pk * qv;
            }
        }
    }
    Ok(DenseMatrix::from_row_major(m, n, values)?.into())
}

/// 0/1 pooling matrix: each row holds exactly `row_weight` ones at distinct
/// columns drawn uniformly, independently per row.
pub fn gen_pooling<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    row_weight: usize,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    check_pooling(m, n, row_weight)?;
    let mut triplets = Vec::with_capacity(m * row_weight);
    for r in 0..m {
        for c in index::sample(rng, n, row_weight) {
            triplets.push((r, c, 1.0));
        }
    }
    Ok(SparseMatrix::from_triplets(m, n, &triplets)?.into())
}

/// 0/1 pooling matrix with exactly `row_weight` ones per row and column
/// degrees differing by at most one. Rows are filled from the least-used
/// columns with random tie-breaking.
pub fn gen_pooling_balanced<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    row_weight: usize,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    check_pooling(m, n, row_weight)?;
    let mut degree = vec![0usize; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut triplets = Vec::with_capacity(m * row_weight);
    for r in 0..m {
        // random permutation, then a stable sort by degree gives a uniform
        // choice among the least-loaded columns
        for k in (1..n).rev() {
            let j = rng.random_range(0..=k);
            order.swap(k, j);
        }
        order.sort_by_key(|&c| degree[c]);
        for &c in &order[..row_weight] {
            degree[c] += 1;
            triplets.push((r, c, 1.0));
        }
    }
    Ok(SparseMatrix::from_triplets(m, n, &triplets)?.into())
}

fn check_pooling(m: usize, n: usize, row_weight: usize) -> Result<()> {
    check_dims(m, n)?;
    if row_weight == 0 || row_weight > n {
        return Err(Error::InvalidParameter(format!(
            "row weight must lie in [1, {n}], got {row_weight}"
        )));
    }
    Ok(())
}

/// Sparse Gaussian matrix: each entry is nonzero with probability `density`
/// and then drawn from `N(0, 1 / (density * n))`, so columns have unit
/// expected squared norm scaled by `m / n`.
pub fn gen_sparse_gaussian<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    density: f64,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    check_dims(m, n)?;
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let sd = (1.0 / (density * n as f64)).sqrt();
    let mut triplets = Vec::with_capacity((density * (m * n) as f64) as usize + 16);
    for r in 0..m {
        for c in 0..n {
            if rng.random::<f64>() < density {
                triplets.push((r, c, sd * rng.sample::<f64, _>(StandardNormal)));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(m, n, &triplets)?.into())
}

/// Bernoulli-Gaussian draw: zero with probability `1 - rho`, else
/// `N(mean, var)`.
pub fn gen_signal<R: Rng + ?Sized>(n: usize, prior: &PriorParams, rng: &mut R) -> Result<Vec<f64>> {
    prior.validate()?;
    let sd = prior.var.sqrt();
    Ok((0..n)
        .map(|_| {
            if rng.random::<f64>() < prior.rho {
                prior.mean + sd * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            }
        })
        .collect())
}

/// Exactly `k` ones at uniformly chosen positions.
pub fn gen_binary_signal<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    if k > n {
        return Err(Error::InvalidParameter(format!("K = {k} exceeds N = {n}")));
    }
    let mut x = vec![0.0; n];
    for i in index::sample(rng, n, k) {
        x[i] = 1.0;
    }
    Ok(x)
}

/// Observations `y = h(Phi x)` through the given channel.
pub fn measure<R: Rng + ?Sized>(
    matrix: &MeasurementMatrix,
    x: &[f64],
    channel: &OutputChannel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    channel.validate()?;
    let z = matrix.mul_vec(x)?;
    Ok(match *channel {
        OutputChannel::Awgn { delta } => {
            let sd = delta.sqrt();
            z.into_iter()
                .map(|v| {
                    if delta > 0.0 {
                        v + sd * rng.sample::<f64, _>(StandardNormal)
                    } else {
                        v
                    }
                })
                .collect()
        }
        OutputChannel::Sign => z.into_iter().map(|v| if v < 0.0 { -1.0 } else { 1.0 }).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    GaussianIid { gamma: f64 },
    LowRank { eta: f64 },
    Pooling {
        row_weight: usize,
        #[serde(default)]
        balanced: bool,
    },
    SparseGaussian { density: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn generate(&self) -> Result<MeasurementMatrix> {
        self.generate_with(&mut seeded_rng(self.seed))
    }

    pub fn generate_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MeasurementMatrix> {
        match self.kind {
            EnsembleKind::GaussianIid { gamma } => gen_gaussian_iid(self.m, self.n, gamma, rng),
            EnsembleKind::LowRank { eta } => gen_lowrank(self.m, self.n, eta, rng),
            EnsembleKind::Pooling { row_weight, balanced: false } => {
                gen_pooling(self.m, self.n, row_weight, rng)
            }
            EnsembleKind::Pooling { row_weight, balanced: true } => {
                gen_pooling_balanced(self.m, self.n, row_weight, rng)
            }
            EnsembleKind::SparseGaussian { density } => {
                gen_sparse_gaussian(self.m, self.n, density, rng)
            }
        }
    }
}
