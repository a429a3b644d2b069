//! Inner loops of parallel AMP and swept AMP, generic over the matrix
//! storage and the channel score.

use rand::seq::SliceRandom;
use rand::Rng;

use super::operator::Columns;
use super::state::SolverState;
use crate::channels::{OutputChannel, VAR_FLOOR};
use crate::priors::PriorParams;

pub(crate) trait Score {
    /// `(g, -dg/domega)` for measurement `mu` at projection mean and variance.
    fn eval(&self, mu: usize, mean: f64, var: f64) -> (f64, f64);
}

/// AWGN residual written out directly: `(y - omega) / (delta + V)`.
pub(crate) struct AwgnScore<'a> {
    pub y: &'a [f64],
    pub delta: f64,
}

impl Score for AwgnScore<'_> {
    #[inline(always)]
    fn eval(&self, mu: usize, mean: f64, var: f64) -> (f64, f64) {
        let inv = 1.0 / (self.delta + var.max(VAR_FLOOR));
        ((self.y[mu] - mean) * inv, inv)
    }
}

/// Score supplied by an arbitrary output channel.
pub(crate) struct ChannelScore<'a> {
    pub y: &'a [f64],
    pub channel: OutputChannel,
}

impl Score for ChannelScore<'_> {
    #[inline(always)]
    fn eval(&self, mu: usize, mean: f64, var: f64) -> (f64, f64) {
        self.channel.score(self.y[mu], mean, var)
    }
}

#[inline]
fn denoise(prior: &PriorParams, a_old: f64, precision: f64, field: f64) -> (f64, f64) {
    if precision == 0.0 {
        // coefficient touches no measurement
        return prior.mean_variance();
    }
    let sigma2 = 1.0 / precision;
    prior.posterior_moments(sigma2, a_old + sigma2 * field)
}

/// One parallel iteration: all `(Sigma^2, R)` from the old state, then all
/// `(a, v)`, then the projections with the Onsager correction.
pub(crate) fn parallel_step<O: Columns, S: Score>(
    op: &O,
    score: &S,
    prior: &PriorParams,
    st: &mut SolverState,
) -> (f64, u64) {
    let (m, n) = (op.rows(), op.cols());
    st.scratch.resize(m, 0.0);
    for mu in 0..m {
        let (g, dg) = score.eval(mu, st.z_mean[mu], st.z_var[mu]);
        st.score[mu] = g;
        st.scratch[mu] = dg;
    }

    let mut visited = 0u64;
    let mut delta_sum = 0.0;
    for i in 0..n {
        let mut precision = 0.0;
        let mut field = 0.0;
        let g = &st.score;
        let dg = &st.scratch;
        op.for_each_in_col(i, |mu, p, p2| {
            precision += p2 * dg[mu];
            field += p * g[mu];
        });
        visited += op.col_len(i) as u64;
        let (a, v) = denoise(prior, st.x_mean[i], precision, field);
        delta_sum += (a - st.x_mean[i]).abs();
        st.x_mean[i] = a;
        st.x_var[i] = v;
    }

    op.project(&st.x_mean, &st.x_var, &mut st.z_mean, &mut st.z_var);
    visited += op.stored() as u64;
    for mu in 0..m {
        st.z_mean[mu] -= st.z_var[mu] * st.score[mu];
    }
    (delta_sum / n as f64, visited)
}

/// One swept iteration: hold the scores, refresh the projections, then
/// update coefficients one at a time in a fresh random order while the
/// projections are maintained incrementally.
pub(crate) fn swept_step<O: Columns, S: Score, R: Rng + ?Sized>(
    op: &O,
    score: &S,
    prior: &PriorParams,
    st: &mut SolverState,
    order: &mut Vec<usize>,
    rng: &mut R,
) -> (f64, u64) {
    let (m, n) = (op.rows(), op.cols());
    for mu in 0..m {
        st.score[mu] = score.eval(mu, st.z_mean[mu], st.z_var[mu]).0;
    }
    op.project(&st.x_mean, &st.x_var, &mut st.z_mean, &mut st.z_var);
    let mut visited = op.stored() as u64;
    for mu in 0..m {
        st.z_mean[mu] -= st.z_var[mu] * st.score[mu];
    }

    order.clear();
    order.extend(0..n);
    order.shuffle(rng);

    let mut delta_sum = 0.0;
    for &i in order.iter() {
        let mut precision = 0.0;
        let mut field = 0.0;
        {
            let (zm, zv) = (&st.z_mean, &st.z_var);
            op.for_each_in_col(i, |mu, p, p2| {
                let (g, dg) = score.eval(mu, zm[mu], zv[mu]);
                precision += p2 * dg;
                field += p * g;
            });
        }
        let a_old = st.x_mean[i];
        let (a, v) = denoise(prior, a_old, precision, field);
        let da = a - a_old;
        let dv = v - st.x_var[i];
        {
            let (zm, zv, held) = (&mut st.z_mean, &mut st.z_var, &st.score);
            op.for_each_in_col(i, |mu, p, p2| {
                let before = zv[mu];
                let after = before + p2 * dv;
                zv[mu] = after;
                zm[mu] += p * da - held[mu] * (after - before);
            });
        }
        visited += 2 * op.col_len(i) as u64;
        delta_sum += da.abs();
        st.x_mean[i] = a;
        st.x_var[i] = v;
    }
    (delta_sum / n as f64, visited)
}
