/// Iterate of the AMP-family solvers.
///
/// Coefficient side: posterior means and variances. Measurement side: the
/// mean and variance of each projection `z` with self-feedback removed, and
/// the channel score held from the start of the current sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x_mean: Vec<f64>,
    pub x_var: Vec<f64>,
    pub z_mean: Vec<f64>,
    pub z_var: Vec<f64>,
    pub score: Vec<f64>,
    /// Completed iterations.
    pub t: usize,
    pub(crate) scratch: Vec<f64>,
}

impl SolverState {
    pub fn n(&self) -> usize {
        self.x_mean.len()
    }

    pub fn m(&self) -> usize {
        self.z_mean.len()
    }

    pub(crate) fn all_finite(&self) -> bool {
        self.x_mean.iter().all(|v| v.is_finite())
            && self.x_var.iter().all(|v| v.is_finite())
            && self.z_mean.iter().all(|v| v.is_finite())
            && self.z_var.iter().all(|v| v.is_finite())
    }

    pub fn mean_square(&self) -> f64 {
        self.x_mean.iter().map(|a| a * a).sum::<f64>() / self.n() as f64
    }
}

/// Work done by one step or sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    /// `mean_i |a_i^new - a_i^old|`.
    pub mean_abs_delta: f64,
    /// Matrix entries touched; one unit is one multiply-accumulate against
    /// a stored entry.
    pub entries_visited: u64,
}
