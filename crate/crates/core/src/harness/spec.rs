use serde::{Deserialize, Serialize};
use toml::Table;

use crate::config;
use crate::error::{Error, Result};
use crate::solvers::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Nonzero-mean Gaussian matrices over a grid of `gamma`.
    GammaSweep,
    /// Low-rank matrices over a grid of `eta`.
    EtaSweep,
    /// 0/1 pooling matrices over a grid of `(M, K)`.
    PoolingPhase,
    /// 1-bit measurements over a grid of `alpha`.
    OnebitAlphaSweep,
    /// Wall time of a fixed number of iterations over a grid of `N`.
    Timing,
}

/// Full description of an experiment. Fields not used by a family are
/// ignored; [`ExperimentSpec::defaults`] gives desk-scale values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub family: Family,
    pub n: usize,
    pub alpha: f64,
    pub rho: f64,
    pub prior_mean: f64,
    pub prior_var: f64,
    pub delta: f64,
    /// Matrix mean for the 1-bit family.
    pub gamma: f64,
    pub gammas: Vec<f64>,
    pub etas: Vec<f64>,
    pub ms: Vec<usize>,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub row_weight: usize,
    /// Balance pool membership across items instead of drawing each pool
    /// independently.
    pub balanced_pools: bool,
    pub density: f64,
    /// Iterations per timed run.
    pub iterations: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub t_max: usize,
    pub epsilon: f64,
    /// MSE below which a compressed-sensing trial counts as recovered.
    pub success_mse: f64,
}

impl ExperimentSpec {
    pub fn defaults(family: Family) -> Self {
        let base = ExperimentSpec {
            family,
            n: 2000,
            alpha: 0.5,
            rho: 0.2,
            prior_mean: 0.0,
            prior_var: 1.0,
            delta: 1e-8,
            gamma: 20.0,
            gammas: vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            etas: vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.55, 0.5],
            ms: vec![25, 50, 75, 100, 125, 150, 200, 250, 300],
            ks: vec![2, 5, 10, 15, 20, 30],
            alphas: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            ns: vec![250, 500, 1000, 2000],
            row_weight: 7,
            balanced_pools: false,
            density: 0.25,
            iterations: 500,
            trials: 5,
            base_seed: 1,
            algorithms: vec![Algorithm::Amp, Algorithm::Swamp],
            t_max: 1000,
            epsilon: 1e-8,
            success_mse: 1e-6,
        };
        match family {
            Family::GammaSweep => base,
            Family::EtaSweep => ExperimentSpec { alpha: 0.6, ..base },
            Family::PoolingPhase => ExperimentSpec {
                n: 500,
                prior_mean: 1.0,
                prior_var: 1e-2,
                trials: 20,
                t_max: 500,
                ..base
            },
            Family::OnebitAlphaSweep => ExperimentSpec {
                n: 512,
                rho: 0.125,
                trials: 20,
                algorithms: vec![Algorithm::Gamp, Algorithm::Gswamp],
                // sign measurements pin the direction of x far better than its
                // norm, which keeps drifting slowly long after the error settles
                t_max: 200,
                epsilon: 1e-4,
                ..base
            },
            Family::Timing => ExperimentSpec {
                alpha: 0.75,
                rho: 0.25,
                trials: 1,
                ..base
            },
        }
    }

    /// Parses a TOML spec. Only `family` is required; every other key
    /// overrides the family defaults. `overrides` are `key=value` strings
    /// applied after the file.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut user = config::parse_table(text)?;
        for o in overrides {
            config::apply_override(&mut user, o)?;
        }
        Self::from_table(user)
    }

    pub fn from_table(user: Table) -> Result<Self> {
        let family: Family = match user.get("family") {
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("family: {e}")))?,
            None => return Err(Error::Config("missing key 'family'".into())),
        };
        let mut table = config::to_table(&Self::defaults(family))?;
        config::merge(&mut table, user);
        let spec: ExperimentSpec = config::from_table(table)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected");
        }
        if self.t_max == 0 || !(self.epsilon > 0.0) {
            return bad("t_max must be >= 1 and epsilon > 0");
        }
        let empty = match self.family {
            Family::GammaSweep => self.gammas.is_empty(),
            Family::EtaSweep => self.etas.is_empty(),
            Family::PoolingPhase => self.ms.is_empty() || self.ks.is_empty(),
            Family::OnebitAlphaSweep => self.alphas.is_empty(),
            Family::Timing => self.ns.is_empty() || self.iterations == 0,
        };
        if empty {
            return bad("empty experiment grid");
        }
        if self.family == Family::PoolingPhase && self.ks.iter().any(|&k| k > self.n) {
            return bad("K exceeds N");
        }
        if self.n == 0 || !(self.alpha > 0.0) {
            return bad("N and alpha must be positive");
        }
        Ok(())
    }
}
