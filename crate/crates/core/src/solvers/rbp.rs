//! Relaxed belief propagation over per-edge Gaussian messages.
//!
//! Keeps four `M x N` message arrays, so it is only meant as a reference
//! on small dense instances. Arrays are stored column-major (`i * m + mu`)
//! because both schedules work coefficient by coefficient.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MeasurementMatrix, ProblemInstance};
use crate::priors::PriorParams;

/// Largest number of per-edge messages (`4 * M * N`) accepted.
pub const MAX_MESSAGES: usize = 40_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Parallel,
    #[default]
    RandomSequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbpState {
    m: usize,
    n: usize,
    /// Factor-to-variable precision messages.
    pub precision: Vec<f64>,
    /// Factor-to-variable field messages.
    pub field: Vec<f64>,
    /// Variable-to-factor means.
    pub mean: Vec<f64>,
    /// Variable-to-factor variances.
    pub var: Vec<f64>,
    // per-row sums of phi * mean and phi^2 * var over all variables
    row_mean: Vec<f64>,
    row_var: Vec<f64>,
}

impl RbpState {
    fn at(&self, mu: usize, i: usize) -> usize {
        i * self.m + mu
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

pub struct RbpSolver<'a> {
    instance: &'a ProblemInstance,
    phi: Vec<f64>,
    prior: PriorParams,
    delta: f64,
}

impl<'a> RbpSolver<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Result<Self> {
        Self::with_prior(instance, instance.prior)
    }

    pub fn with_prior(instance: &'a ProblemInstance, prior: PriorParams) -> Result<Self> {
        let MeasurementMatrix::Dense(d) = &instance.matrix else {
            return Err(Error::Unsupported("relaxed BP needs a dense matrix".into()));
        };
        let crate::channels::OutputChannel::Awgn { .. } = instance.channel else {
            return Err(Error::Unsupported("relaxed BP supports the AWGN channel only".into()));
        };
        let (m, n) = (d.rows(), d.cols());
        if m.saturating_mul(n).saturating_mul(4) > MAX_MESSAGES {
            return Err(Error::Unsupported(format!(
                "{m}x{n} exceeds the relaxed BP message budget"
            )));
        }
        let mut phi = vec![0.0; m * n];
        for mu in 0..m {
            for (i, &p) in d.row(mu).iter().enumerate() {
                phi[i * m + mu] = p;
            }
        }
        Ok(RbpSolver {
            instance,
            phi,
            prior,
            delta: instance.channel.effective_delta(),
        })
    }

    pub fn init(&self) -> RbpState {
        let (m, n) = (self.instance.m(), self.instance.n());
        let (a0, v0) = self.prior.mean_variance();
        let mut st = RbpState {
            m,
            n,
            precision: vec![0.0; m * n],
            field: vec![0.0; m * n],
            mean: vec![a0; m * n],
            var: vec![v0; m * n],
            row_mean: vec![0.0; m],
            row_var: vec![0.0; m],
        };
        self.refresh_rows(&mut st);
        st
    }

    fn refresh_rows(&self, st: &mut RbpState) {
        st.row_mean.fill(0.0);
        st.row_var.fill(0.0);
        for k in 0..st.m * st.n {
            let mu = k % st.m;
            let p = self.phi[k];
            st.row_mean[mu] += p * st.mean[k];
            st.row_var[mu] += p * p * st.var[k];
        }
    }

    /// Factor-to-variable messages into coefficient `i`.
    fn update_incoming(&self, st: &mut RbpState, i: usize) {
        let y = &self.instance.y;
        for mu in 0..st.m {
            let k = st.at(mu, i);
            let p = self.phi[k];
            let cav_var = (st.row_var[mu] - p * p * st.var[k]).max(0.0);
            let cav_mean = st.row_mean[mu] - p * st.mean[k];
            let denom = self.delta + cav_var;
            st.precision[k] = p * p / denom;
            st.field[k] = p * (y[mu] - cav_mean) / denom;
        }
    }

    /// Variable-to-factor messages out of coefficient `i`. With
    /// `track_rows` the row sums are updated in place.
    fn update_outgoing(&self, st: &mut RbpState, i: usize, track_rows: bool) {
        let span = i * st.m..(i + 1) * st.m;
        let total_prec: f64 = st.precision[span.clone()].iter().sum();
        let total_field: f64 = st.field[span].iter().sum();
        for mu in 0..st.m {
            let k = st.at(mu, i);
            let prec = total_prec - st.precision[k];
            let fld = total_field - st.field[k];
            let (a, v) = if prec > 0.0 {
                self.prior.posterior_moments(1.0 / prec, fld / prec)
            } else {
                self.prior.mean_variance()
            };
            if track_rows {
                let p = self.phi[k];
                st.row_mean[mu] += p * (a - st.mean[k]);
                st.row_var[mu] += p * p * (v - st.var[k]);
            }
            st.mean[k] = a;
            st.var[k] = v;
        }
    }

    /// One full update of every message.
    pub fn step<R: Rng + ?Sized>(&self, st: &mut RbpState, schedule: Schedule, rng: &mut R) -> Result<()> {
        match schedule {
            Schedule::Parallel => {
                for i in 0..st.n {
                    self.update_incoming(st, i);
                }
                for i in 0..st.n {
                    self.update_outgoing(st, i, false);
                }
                self.refresh_rows(st);
            }
            Schedule::RandomSequential => {
                let mut order: Vec<usize> = (0..st.n).collect();
                order.shuffle(rng);
                for i in order {
                    self.update_incoming(st, i);
                    self.update_outgoing(st, i, true);
                }
            }
        }
        let finite = st.precision.iter().chain(&st.field).chain(&st.mean).chain(&st.var).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Diverged("non-finite relaxed BP message".into()));
        }
        Ok(())
    }

    /// Full-sum posterior means and variances of each coefficient.
    pub fn marginals(&self, st: &RbpState) -> (Vec<f64>, Vec<f64>) {
        (0..st.n)
            .map(|i| {
                let span = i * st.m..(i + 1) * st.m;
                let prec: f64 = st.precision[span.clone()].iter().sum();
                let fld: f64 = st.field[span].iter().sum();
                if prec > 0.0 {
                    self.prior.posterior_moments(1.0 / prec, fld / prec)
                } else {
                    self.prior.mean_variance()
                }
            })
            .unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::OutputChannel;
    use crate::model::{seeded_rng, DenseMatrix};

    #[test]
    fn single_pair_is_scalar_posterior() {
        let prior = PriorParams::new(0.4, 0.0, 1.0).unwrap();
        let phi = DenseMatrix::from_row_major(1, 1, vec![0.7]).unwrap();
        let inst = ProblemInstance::new(phi.into(), vec![0.3], None, OutputChannel::Awgn { delta: 0.05 }, prior).unwrap();
        let solver = RbpSolver::new(&inst).unwrap();
        let mut st = solver.init();
        for schedule in [Schedule::Parallel, Schedule::RandomSequential] {
            solver.step(&mut st, schedule, &mut seeded_rng(0)).unwrap();
            let (a, v) = solver.marginals(&st);
            let (ea, ev) = prior.fa_fc(0.05 / 0.49, 0.3 / 0.7).unwrap();
            assert!((a[0] - ea).abs() < 1e-12 && (v[0] - ev).abs() < 1e-12);
            // the only outgoing message has no other factor to listen to
            assert_eq!((st.mean[0], st.var[0]), prior.mean_variance());
        }
    }

    #[test]
    fn empty_prior_marginals_are_zero() {
        let prior = PriorParams::new(0.0, 0.0, 1.0).unwrap();
        let phi = crate::model::gen_gaussian_iid(4, 6, 0.0, &mut seeded_rng(1)).unwrap();
        let inst = ProblemInstance::new(phi, vec![0.1; 4], None, OutputChannel::Awgn { delta: 0.1 }, prior).unwrap();
        let solver = RbpSolver::new(&inst).unwrap();
        let mut st = solver.init();
        solver.step(&mut st, Schedule::RandomSequential, &mut seeded_rng(0)).unwrap();
        let (a, v) = solver.marginals(&st);
        assert!(a.iter().chain(&v).all(|&x| x == 0.0));
    }

    #[test]
    fn marginal_is_cavity_plus_one_message() {
        let prior = PriorParams::new(0.3, 0.0, 1.0).unwrap();
        let mut rng = seeded_rng(4);
        let phi = crate::model::gen_gaussian_iid(5, 8, 0.0, &mut rng).unwrap();
        let inst = ProblemInstance::new(phi, vec![0.2, -0.1, 0.4, 0.0, 1.0], None, OutputChannel::Awgn { delta: 0.1 }, prior).unwrap();
        let solver = RbpSolver::new(&inst).unwrap();
        let mut st = solver.init();
        solver.step(&mut st, Schedule::RandomSequential, &mut rng).unwrap();
        let (a, _) = solver.marginals(&st);
        for i in 0..8 {
            let span = i * 5..(i + 1) * 5;
            let tp: f64 = st.precision[span.clone()].iter().sum();
            let tf: f64 = st.field[span].iter().sum();
            for mu in 0..5 {
                let k = i * 5 + mu;
                let cp = tp - st.precision[k];
                let cf = tf - st.field[k];
                let (re, _) = prior.fa_fc(1.0 / (cp + st.precision[k]), (cf + st.field[k]) / (cp + st.precision[k])).unwrap();
                assert!((re - a[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_sparse_and_sign() {
        let prior = PriorParams::new(0.3, 0.0, 1.0).unwrap();
        let phi = crate::model::gen_pooling(3, 5, 2, &mut seeded_rng(0)).unwrap();
        let inst = ProblemInstance::new(phi, vec![0.0; 3], None, OutputChannel::Awgn { delta: 0.1 }, prior).unwrap();
        assert!(RbpSolver::new(&inst).is_err());
        let phi = crate::model::gen_gaussian_iid(3, 5, 0.0, &mut seeded_rng(0)).unwrap();
        let inst = ProblemInstance::new(phi, vec![1.0; 3], None, OutputChannel::Sign, prior).unwrap();
        assert!(RbpSolver::new(&inst).is_err());
    }
}
