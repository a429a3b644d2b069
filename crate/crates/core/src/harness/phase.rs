use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::run::{run_experiment, TrialResult};
use super::spec::{ExperimentSpec, Family};
use crate::error::{Error, Result};
use crate::solvers::Algorithm;

/// Success fractions over an `(M, K)` grid with the 50% transition line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub ms: Vec<usize>,
    pub ks: Vec<usize>,
    /// `fraction[alg][m_index][k_index]`.
    pub fraction: BTreeMap<Algorithm, Vec<Vec<f64>>>,
    /// For each `K`, the interpolated `M` at which the success fraction
    /// first reaches one half; `None` if it never does on the grid.
    pub contour: BTreeMap<Algorithm, Vec<(usize, Option<f64>)>>,
}

/// Runs a pooling experiment and tabulates it.
pub fn phase_diagram(spec: &ExperimentSpec) -> Result<PhaseDiagram> {
    let results = run_experiment(spec, |_, _| {})?;
    tabulate_phase(spec, &results)
}

pub fn tabulate_phase(spec: &ExperimentSpec, results: &[TrialResult]) -> Result<PhaseDiagram> {
    if spec.family != Family::PoolingPhase {
        return Err(Error::Config("phase diagrams need the pooling_phase family".into()));
    }
    let mut fraction = BTreeMap::new();
    let mut contour = BTreeMap::new();
    for &alg in &spec.algorithms {
        let mut grid = vec![vec![0.0; spec.ks.len()]; spec.ms.len()];
        for (mi, &m) in spec.ms.iter().enumerate() {
            for (ki, &k) in spec.ks.iter().enumerate() {
                let outcomes: Vec<bool> = results
                    .iter()
                    .filter(|r| r.cell.m == m && r.cell.k == Some(k))
                    .filter_map(|r| r.outcome(alg).map(|o| o.success))
                    .collect();
                if !outcomes.is_empty() {
                    grid[mi][ki] = outcomes.iter().filter(|&&s| s).count() as f64 / outcomes.len() as f64;
                }
            }
        }
        let line = (0..spec.ks.len())
            .map(|ki| {
                let column: Vec<f64> = grid.iter().map(|row| row[ki]).collect();
                (spec.ks[ki], half_crossing(&spec.ms, &column))
            })
            .collect();
        fraction.insert(alg, grid);
        contour.insert(alg, line);
    }
    Ok(PhaseDiagram {
        ms: spec.ms.clone(),
        ks: spec.ks.clone(),
        fraction,
        contour,
    })
}

/// Smallest `M` where `fractions` (ordered like `ms`, ascending) reaches 0.5,
/// linearly interpolated between grid points.
pub fn half_crossing(ms: &[usize], fractions: &[f64]) -> Option<f64> {
    let mut order: Vec<usize> = (0..ms.len()).collect();
    order.sort_by_key(|&i| ms[i]);
    let mut prev: Option<(f64, f64)> = None;
    for i in order {
        let (m, f) = (ms[i] as f64, fractions[i]);
        if f >= 0.5 {
            return Some(match prev {
                None => m,
                Some((pm, pf)) => pm + (0.5 - pf) / (f - pf) * (m - pm),
            });
        }
        prev = Some((m, f));
    }
    None
}

impl PhaseDiagram {
    /// Long-format CSV: `algorithm, m, k, fraction`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "m", "k", "fraction"])?;
        for (alg, grid) in &self.fraction {
            for (mi, &m) in self.ms.iter().enumerate() {
                for (ki, &k) in self.ks.iter().enumerate() {
                    w.write_record([alg.name().to_string(), m.to_string(), k.to_string(), format!("{}", grid[mi][ki])])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// CSV: `algorithm, k, m_half`; empty `m_half` where the grid never
    /// reaches 50%.
    pub fn write_contour_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "k", "m_half"])?;
        for (alg, line) in &self.contour {
            for &(k, m) in line {
                w.write_record([alg.name().to_string(), k.to_string(), m.map(|v| format!("{v}")).unwrap_or_default()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_between_grid_points() {
        assert_eq!(half_crossing(&[10, 20, 30], &[0.0, 0.25, 0.75]), Some(25.0));
        assert_eq!(half_crossing(&[10, 20], &[0.6, 1.0]), Some(10.0));
        assert_eq!(half_crossing(&[10, 20], &[0.1, 0.4]), None);
        assert_eq!(half_crossing(&[30, 10, 20], &[0.75, 0.0, 0.25]), Some(25.0));
    }
}
