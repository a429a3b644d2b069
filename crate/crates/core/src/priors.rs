//! Bernoulli-Gaussian prior and its scalar denoisers.
//!
//! The prior on each coefficient is `rho * N(x; mean, var) + (1 - rho) * delta(x)`.
//! Given a Gaussian pseudo-observation of the coefficient with mean `r` and
//! variance `sigma2`, [`PriorParams::fa_fc`] returns the posterior mean and
//! variance. The slab weight is evaluated as a logistic of log-odds so that
//! large `|r| / sigma` never overflows.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorParams {
    /// Fraction of nonzero coefficients, in `[0, 1]`.
    pub rho: f64,
    /// Mean of the nonzero component.
    pub mean: f64,
    /// Variance of the nonzero component, strictly positive.
    pub var: f64,
}

impl PriorParams {
    pub fn new(rho: f64, mean: f64, var: f64) -> Result<Self> {
        let p = PriorParams { rho, mean, var };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("prior rho", self.rho)?;
        ensure_finite("prior mean", self.mean)?;
        ensure_finite("prior variance", self.var)?;
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        if self.var <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "prior variance must be positive, got {}",
                self.var
            )));
        }
        Ok(())
    }

    /// Mean and variance of a single coefficient drawn from the prior.
    pub fn mean_variance(&self) -> (f64, f64) {
        let m0 = self.rho * self.mean;
        let v0 = self.rho * (self.var + self.mean * self.mean) - m0 * m0;
        (m0, v0.max(0.0))
    }

    /// Second moment `E[x^2]` under the prior.
    pub fn second_moment(&self) -> f64 {
        self.rho * (self.var + self.mean * self.mean)
    }

    /// Posterior mean (`f_a`) and variance (`f_c`) of a coefficient observed
    /// through a Gaussian with mean `r` and variance `sigma2`.
    pub fn fa_fc(&self, sigma2: f64, r: f64) -> Result<(f64, f64)> {
        ensure_finite("sigma2", sigma2)?;
        ensure_finite("r", r)?;
        if sigma2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        Ok(self.posterior_moments(sigma2, r))
    }

    /// Unchecked form of [`fa_fc`](Self::fa_fc) used inside the solver loops.
    /// An infinite `sigma2` (no information) returns the prior moments.
    #[inline]
    pub(crate) fn posterior_moments(&self, sigma2: f64, r: f64) -> (f64, f64) {
        if self.rho <= 0.0 {
            return (0.0, 0.0);
        }
        if sigma2 == f64::INFINITY {
            return self.mean_variance();
        }
        let total = self.var + sigma2;
        let slab_mean = (self.mean * sigma2 + r * self.var) / total;
        let slab_var = self.var * sigma2 / total;
        if self.rho >= 1.0 {
            return (slab_mean, slab_var);
        }

        let centered = r - self.mean;
        let log_odds = self.rho.ln() - (-self.rho).ln_1p() - 0.5 * (total / sigma2).ln()
            - centered * centered / (2.0 * total)
            + r * r / (2.0 * sigma2);
        let (w, w_comp) = logistic_pair(log_odds);

        let fa = w * slab_mean;
        let fc = w * slab_var + w * w_comp * slab_mean * slab_mean;
        (fa, fc.max(0.0))
    }
}

/// Returns `(s, 1 - s)` with `s = 1 / (1 + exp(-x))`, both without cancellation.
#[inline]
fn logistic_pair(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        let e = (-x).exp();
        let d = 1.0 + e;
        (1.0 / d, e / d)
    } else {
        let e = x.exp();
        let d = 1.0 + e;
        (e / d, 1.0 / d)
    }
}
