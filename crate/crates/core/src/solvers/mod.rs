//! Inference engines: parallel AMP, swept AMP (SwAMP), their generic-channel
//! variants, and relaxed BP as a message-level reference.
//!
//! All AMP-family engines share [`SolverState`] and the same stopping logic
//! in [`solve`]. A swept iteration is inherently sequential; never split the
//! coefficient loop across threads.

pub(crate) mod operator;

mod kernels;
mod rbp;
mod report;
mod state;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rbp::{RbpSolver, RbpState, Schedule, MAX_MESSAGES};
pub use report::{
    solve, Algorithm, SolveConfig, SolveReport, SolveStatus, SolveSummary, TraceRow,
};
pub use state::{SolverState, StepStats};

use self::kernels::{AwgnScore, ChannelScore};
use self::operator::{with_operator, Columns, Operator};
use crate::channels::OutputChannel;
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::priors::PriorParams;

/// Bound on `mean(a^2)` above which a run counts as diverged, relative to
/// the prior second moment.
pub fn default_divergence_threshold(prior: &PriorParams) -> f64 {
    1e6 * (prior.second_moment() + 1.0)
}

/// A problem instance prepared for the AMP-family engines.
pub struct Solver<'a> {
    instance: &'a ProblemInstance,
    op: Operator,
    prior: PriorParams,
    channel: OutputChannel,
    divergence_threshold: f64,
}

impl<'a> Solver<'a> {
    /// Uses the prior and channel recorded in the instance.
    pub fn new(instance: &'a ProblemInstance) -> Self {
        Solver {
            instance,
            op: Operator::new(&instance.matrix),
            prior: instance.prior,
            channel: instance.channel,
            divergence_threshold: default_divergence_threshold(&instance.prior),
        }
    }

    pub fn with_prior(mut self, prior: PriorParams) -> Self {
        self.prior = prior;
        self.divergence_threshold = default_divergence_threshold(&prior);
        self
    }

    pub fn with_divergence_threshold(mut self, threshold: f64) -> Self {
        self.divergence_threshold = threshold;
        self
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.instance
    }

    pub fn prior(&self) -> &PriorParams {
        &self.prior
    }

    pub fn divergence_threshold(&self) -> f64 {
        self.divergence_threshold
    }

    /// Prior moments on the coefficients, `V = Phi^2 v`, `omega = Phi a`,
    /// zero scores.
    pub fn init_state(&self) -> SolverState {
        let (n, m) = (self.instance.n(), self.instance.m());
        let (a0, v0) = self.prior.mean_variance();
        let mut st = SolverState {
            x_mean: vec![a0; n],
            x_var: vec![v0; n],
            z_mean: vec![0.0; m],
            z_var: vec![0.0; m],
            score: vec![0.0; m],
            t: 0,
            scratch: Vec::new(),
        };
        with_operator!(&self.op, op => op.project(&st.x_mean, &st.x_var, &mut st.z_mean, &mut st.z_var));
        st
    }

    fn awgn_score(&self) -> Result<AwgnScore<'_>> {
        match self.channel {
            OutputChannel::Awgn { .. } => Ok(AwgnScore {
                y: &self.instance.y,
                delta: self.channel.effective_delta(),
            }),
            other => Err(Error::Unsupported(format!(
                "AWGN-specific solver used with the {} channel",
                other.name()
            ))),
        }
    }

    fn channel_score(&self) -> ChannelScore<'_> {
        ChannelScore {
            y: &self.instance.y,
            channel: self.channel,
        }
    }

    fn check(&self, st: &SolverState) -> Result<()> {
        if st.n() != self.instance.n() || st.m() != self.instance.m() {
            return Err(Error::Dimension("state does not match the instance".into()));
        }
        Ok(())
    }

    fn finish(&self, st: &mut SolverState, (mean_abs_delta, visited): (f64, u64)) -> Result<StepStats> {
        st.t += 1;
        if !st.all_finite() || !mean_abs_delta.is_finite() {
            return Err(Error::Diverged(format!("non-finite state at iteration {}", st.t)));
        }
        let ms = st.mean_square();
        if ms > self.divergence_threshold {
            return Err(Error::Diverged(format!(
                "mean(a^2) = {ms:.3e} at iteration {}",
                st.t
            )));
        }
        Ok(StepStats {
            mean_abs_delta,
            entries_visited: visited,
        })
    }

    /// Parallel AMP iteration for the AWGN channel.
    pub fn amp_step(&self, st: &mut SolverState) -> Result<StepStats> {
        self.check(st)?;
        let score = self.awgn_score()?;
        let out = with_operator!(&self.op, op => kernels::parallel_step(op, &score, &self.prior, st));
        self.finish(st, out)
    }

    /// Parallel iteration with the channel's `gout` / `dgout`.
    pub fn gamp_step(&self, st: &mut SolverState) -> Result<StepStats> {
        self.check(st)?;
        let score = self.channel_score();
        let out = with_operator!(&self.op, op => kernels::parallel_step(op, &score, &self.prior, st));
        self.finish(st, out)
    }

    /// Swept AMP iteration for the AWGN channel.
    pub fn swamp_sweep<R: Rng + ?Sized>(&self, st: &mut SolverState, rng: &mut R) -> Result<StepStats> {
        self.check(st)?;
        let score = self.awgn_score()?;
        let mut order = Vec::with_capacity(st.n());
        let out = with_operator!(&self.op, op => kernels::swept_step(op, &score, &self.prior, st, &mut order, rng));
        self.finish(st, out)
    }

    /// Swept iteration with the channel's `gout` / `dgout`.
    pub fn gswamp_sweep<R: Rng + ?Sized>(&self, st: &mut SolverState, rng: &mut R) -> Result<StepStats> {
        self.check(st)?;
        let score = self.channel_score();
        let mut order = Vec::with_capacity(st.n());
        let out = with_operator!(&self.op, op => kernels::swept_step(op, &score, &self.prior, st, &mut order, rng));
        self.finish(st, out)
    }

    /// One iteration of `algorithm`; relaxed BP is not an AMP-family engine.
    pub fn step(&self, algorithm: Algorithm, st: &mut SolverState, rng: &mut ChaCha8Rng) -> Result<StepStats> {
        match algorithm {
            Algorithm::Amp => self.amp_step(st),
            Algorithm::Gamp => self.gamp_step(st),
            Algorithm::Swamp => self.swamp_sweep(st, rng),
            Algorithm::Gswamp => self.gswamp_sweep(st, rng),
            Algorithm::Rbp => Err(Error::Unsupported("use RbpSolver for relaxed BP".into())),
        }
    }

    /// `(Phi a - V g, Phi^2 v)` recomputed from scratch, with `g` the held
    /// scores in `st`. After a sweep this must match the incrementally
    /// maintained projections.
    pub fn recompute_projection(&self, st: &SolverState) -> (Vec<f64>, Vec<f64>) {
        let m = self.instance.m();
        let mut mean = vec![0.0; m];
        let mut var = vec![0.0; m];
        with_operator!(&self.op, op => op.project(&st.x_mean, &st.x_var, &mut mean, &mut var));
        for mu in 0..m {
            mean[mu] -= var[mu] * st.score[mu];
        }
        (mean, var)
    }
}
