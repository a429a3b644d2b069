//! Output channels: the map from the noiseless projection `z` to the
//! observation `y`, and the score function used by the generalized solvers.
//!
//! For a Gaussian belief `z ~ N(omega, v)` and an observation `y`,
//! `gout = (E[z | y] - omega) / v` and `dgout = -d gout / d omega`.
//! With an additive Gaussian channel these reduce to `(y - omega) / (delta + v)`
//! and `1 / (delta + v)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::special::erfcx;

/// Lower bound on the noise variance inside denominators.
pub const DELTA_FLOOR: f64 = 1e-12;

/// Lower bound on the projection variance fed to a channel. Stored
/// variances are never clamped, so incremental updates stay exact.
pub const VAR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OutputChannel {
    /// `y = z + N(0, delta)`.
    Awgn { delta: f64 },
    /// Noiseless 1-bit quantizer `y = sign(z)`, `sign(0) = +1`.
    Sign,
}

impl OutputChannel {
    pub fn awgn(delta: f64) -> Result<Self> {
        let c = OutputChannel::Awgn { delta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let OutputChannel::Awgn { delta } = *self {
            ensure_finite("channel delta", delta)?;
            if delta < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "noise variance must be non-negative, got {delta}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            OutputChannel::Awgn { .. } => "awgn",
            OutputChannel::Sign => "sign",
        }
    }

    /// Noise variance with the floor applied; zero for the sign channel.
    pub fn effective_delta(&self) -> f64 {
        match *self {
            OutputChannel::Awgn { delta } => delta.max(DELTA_FLOOR),
            OutputChannel::Sign => 0.0,
        }
    }

    pub fn gout(&self, y: f64, omega: f64, v: f64) -> Result<f64> {
        check_args(y, omega, v)?;
        Ok(self.score(y, omega, v).0)
    }

    pub fn dgout(&self, y: f64, omega: f64, v: f64) -> Result<f64> {
        check_args(y, omega, v)?;
        Ok(self.score(y, omega, v).1)
    }

    /// `(gout, dgout)` without argument checks.
    #[inline]
    pub(crate) fn score(&self, y: f64, omega: f64, v: f64) -> (f64, f64) {
        match *self {
            OutputChannel::Awgn { delta } => {
                let inv = 1.0 / (delta.max(DELTA_FLOOR) + v.max(VAR_FLOOR));
                ((y - omega) * inv, inv)
            }
            OutputChannel::Sign => sign_score(y, omega, v.max(VAR_FLOOR)),
        }
    }
}

fn check_args(y: f64, omega: f64, v: f64) -> Result<()> {
    ensure_finite("observation", y)?;
    ensure_finite("omega", omega)?;
    ensure_finite("projection variance", v)?;
    if v <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "projection variance must be positive, got {v}"
        )));
    }
    Ok(())
}

/// Truncated-Gaussian score for `y = sign(z)`.
///
/// With `t = y * omega / sqrt(v)` the hazard `h = phi(t) / Phi(t)` is
/// `sqrt(2/pi) / erfcx(-t / sqrt(2))`, which stays finite for any `t`.
#[inline]
fn sign_score(y: f64, omega: f64, v: f64) -> (f64, f64) {
    let s = if y < 0.0 { -1.0 } else { 1.0 };
    let sd = v.sqrt();
    let t = s * omega / sd;
    let h = (2.0 / PI).sqrt() / erfcx(-t * std::f64::consts::FRAC_1_SQRT_2);
    let g = s * h / sd;
    let dg = h * (t + h) / v;
    (g, dg.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn awgn_direct_formula() {
        let c = OutputChannel::awgn(1.0).unwrap();
        assert_eq!(c.gout(1.0, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(c.dgout(1.0, 0.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn awgn_zero_noise_uses_floor() {
        let c = OutputChannel::awgn(0.0).unwrap();
        assert_eq!(c.effective_delta(), DELTA_FLOOR);
        assert!(c.dgout(0.0, 0.0, 1e-300).unwrap().is_finite());
    }

    #[test]
    fn sign_at_origin_is_half_normal_mean() {
        let g = OutputChannel::Sign.gout(1.0, 0.0, 1.0).unwrap();
        assert!((g - (2.0 / PI).sqrt()).abs() < 1e-15);
        let dg = OutputChannel::Sign.dgout(1.0, 0.0, 1.0).unwrap();
        assert!((dg - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sign_is_odd() {
        for &(w, v) in &[(0.3, 1.0), (-2.5, 0.2), (7.0, 3.0)] {
            let a = OutputChannel::Sign.gout(1.0, w, v).unwrap();
            let b = OutputChannel::Sign.gout(-1.0, -w, v).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn rejects_bad_variance() {
        assert!(OutputChannel::Sign.gout(1.0, 0.0, 0.0).is_err());
        assert!(OutputChannel::Sign.dgout(1.0, f64::NAN, 1.0).is_err());
        assert!(OutputChannel::awgn(-1.0).is_err());
    }

    #[test]
    fn extreme_tails_are_finite() {
        for &t in &[-40.0, -25.0, 25.0, 40.0] {
            let (g, dg) = OutputChannel::Sign.score(1.0, t, 1.0);
            assert!(g.is_finite() && dg.is_finite() && dg >= 0.0, "t={t}: {g} {dg}");
        }
        // deep in the wrong half-space the score approaches -omega / v
        let (g, _) = OutputChannel::Sign.score(1.0, -30.0, 1.0);
        assert!((g - 30.0).abs() < 0.05);
    }
}
