//! Sparse signal recovery with approximate message passing.
//!
//! Implements parallel AMP, swept AMP (coefficients updated one at a time
//! in a random order with the projections maintained incrementally), their
//! generic-channel variants, and relaxed belief propagation, together with
//! the problem ensembles and the experiment harness used to compare them.
//!
//! ```
//! use swamp_core::model::{gen_gaussian_iid, gen_signal, measure, seeded_rng, ProblemInstance};
//! use swamp_core::{solve, Algorithm, OutputChannel, PriorParams, SolveConfig, SolveStatus};
//!
//! let mut rng = seeded_rng(7);
//! let prior = PriorParams::new(0.1, 0.0, 1.0).unwrap();
//! let phi = gen_gaussian_iid(120, 200, 0.0, &mut rng).unwrap();
//! let x = gen_signal(200, &prior, &mut rng).unwrap();
//! let channel = OutputChannel::Awgn { delta: 1e-8 };
//! let y = measure(&phi, &x, &channel, &mut rng).unwrap();
//! let inst = ProblemInstance::new(phi, y, Some(x), channel, prior).unwrap();
//!
//! let report = solve(&inst, &SolveConfig::new(Algorithm::Swamp)).unwrap();
//! assert_eq!(report.status, SolveStatus::Converged);
//! assert!(report.final_mse().unwrap() < 1e-6);
//! ```

pub mod channels;
pub mod config;
pub mod error;
pub mod harness;
pub mod model;
pub mod priors;
pub mod solvers;
pub mod special;

pub use channels::OutputChannel;
pub use error::{Error, Result};
pub use model::{MeasurementMatrix, ProblemInstance};
pub use priors::PriorParams;
pub use solvers::{solve, Algorithm, SolveConfig, SolveReport, SolveStatus, Solver, SolverState};
