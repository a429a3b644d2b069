//! Experiment orchestration: problem families, seeded trials, phase
//! diagrams, timing, and CSV output.

mod metrics;
mod output;
mod phase;
mod run;
mod spec;
mod timing;

pub use metrics::{mse, normalized_mse, support_recovered};
pub use output::{csv_header, emit_csv, write_results_csv, Manifest};
pub use phase::{half_crossing, phase_diagram, tabulate_phase, PhaseDiagram};
pub use run::{
    build_instance, cells, child_seed, run_cell, run_experiment, AlgorithmOutcome, Cell,
    TrialResult, SUPPORT_THRESHOLD,
};
pub use spec::{ExperimentSpec, Family};
pub use timing::{loglog_slope, timing_benchmark, TimingRow, TimingTable};
