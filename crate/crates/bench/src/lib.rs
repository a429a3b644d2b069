//! Fixtures for the criterion benchmarks in `benches/`.

use swamp_core::harness::{build_instance, cells, ExperimentSpec, Family};
use swamp_core::ProblemInstance;

/// Timing-family instance with `n` coefficients: 25%-dense sparse Gaussian
/// matrix, `M = 0.75 N`, Bernoulli-Gaussian signal with `rho = 0.25`.
pub fn timing_instance(n: usize, seed: u64) -> ProblemInstance {
    let spec = ExperimentSpec {
        ns: vec![n],
        ..ExperimentSpec::defaults(Family::Timing)
    };
    let cell = cells(&spec)[0];
    build_instance(&spec, &cell, seed).expect("timing fixture")
}

/// 1-bit instance with `M = alpha N` and projector mean `gamma / N`.
pub fn onebit_instance(n: usize, alpha: f64, gamma: f64, seed: u64) -> ProblemInstance {
    let spec = ExperimentSpec {
        n,
        gamma,
        alphas: vec![alpha],
        ..ExperimentSpec::defaults(Family::OnebitAlphaSweep)
    };
    let cell = cells(&spec)[0];
    build_instance(&spec, &cell, seed).expect("1-bit fixture")
}
