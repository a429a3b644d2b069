//! Acceptance criteria A1-A11. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fail. Pass criterion ids (`A3 A8`) as arguments to
//! run a subset.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use swamp_core::channels::OutputChannel;
use swamp_core::harness::{
    child_seed, run_experiment, tabulate_phase, timing_benchmark, ExperimentSpec, Family,
    TrialResult,
};
use swamp_core::model::seeded_rng;
use swamp_core::solvers::Schedule;
use swamp_core::{solve, Algorithm, PriorParams, SolveConfig, SolveStatus, Solver, SolverState};

use common::{gaussian_instance, prior_moments_by_quadrature, sign_gout_by_quadrature};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn count(results: &[TrialResult], cell: usize, alg: Algorithm, pred: impl Fn(&swamp_core::harness::AlgorithmOutcome) -> bool) -> usize {
    results
        .iter()
        .filter(|r| r.cell.index == cell)
        .filter_map(|r| r.outcome(alg))
        .filter(|o| pred(o))
        .count()
}

fn converge<F: FnMut(&mut SolverState) -> f64>(st: &mut SolverState, tol: f64, max: usize, mut step: F) -> usize {
    for t in 1..=max {
        if step(st) < tol {
            return t;
        }
    }
    max
}

fn a1_fixed_point() -> Outcome {
    let inst = gaussian_instance(500, 1000, 0.0, 0.2, 1e-8, 11);
    let solver = Solver::new(&inst);
    let mut rng = seeded_rng(3);

    let mut sw = solver.init_state();
    let t_sw = converge(&mut sw, 1e-13, 5000, |st| solver.swamp_sweep(st, &mut rng).unwrap().mean_abs_delta);
    let mut probe = sw.clone();
    let amp_after_swamp = solver.amp_step(&mut probe).unwrap().mean_abs_delta;

    let mut amp = solver.init_state();
    let t_amp = converge(&mut amp, 1e-13, 5000, |st| solver.amp_step(st).unwrap().mean_abs_delta);
    let mut probe = amp.clone();
    let swamp_after_amp = solver.swamp_sweep(&mut probe, &mut rng).unwrap().mean_abs_delta;

    outcome(
        amp_after_swamp < 1e-9 && swamp_after_amp < 1e-9,
        format!(
            "AMP step at SwAMP fixed point moves a by {amp_after_swamp:.2e} ({t_sw} sweeps); \
             SwAMP sweep at AMP fixed point moves a by {swamp_after_amp:.2e} ({t_amp} steps)"
        ),
    )
}

fn a2_gamma_sweep() -> Outcome {
    let spec = ExperimentSpec {
        n: 2000,
        alpha: 0.5,
        rho: 0.2,
        delta: 1e-8,
        gammas: vec![0.0, 5.0, 20.0, 50.0],
        trials: 5,
        ..ExperimentSpec::defaults(Family::GammaSweep)
    };
    let results = run_experiment(&spec, |_, _| {}).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (ci, &g) in spec.gammas.iter().enumerate() {
        let sw = count(&results, ci, Algorithm::Swamp, |o| o.final_mse < 1e-6);
        let amp_div = count(&results, ci, Algorithm::Amp, |o| o.status == SolveStatus::Diverged);
        pass &= sw >= 4;
        if g >= 5.0 {
            pass &= amp_div >= 4;
        }
        parts.push(format!("gamma={g}: swamp ok {sw}/5, amp diverged {amp_div}/5"));
    }
    outcome(pass, parts.join("; "))
}

fn a3_eta_sweep() -> Outcome {
    let spec = ExperimentSpec {
        n: 2000,
        alpha: 0.6,
        rho: 0.2,
        etas: vec![0.55, 0.5],
        trials: 5,
        ..ExperimentSpec::defaults(Family::EtaSweep)
    };
    let results = run_experiment(&spec, |_, _| {}).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (ci, &eta) in spec.etas.iter().enumerate() {
        let sw = count(&results, ci, Algorithm::Swamp, |o| o.final_mse < 1e-6);
        let amp_div = count(&results, ci, Algorithm::Amp, |o| o.status == SolveStatus::Diverged);
        pass &= sw >= 4 && amp_div >= 4;
        parts.push(format!("eta={eta}: swamp ok {sw}/5, amp diverged {amp_div}/5"));
    }
    outcome(pass, parts.join("; "))
}

fn a4_prior_identity() -> Outcome {
    let sigma2s: Vec<f64> = (0..10).map(|k| 10f64.powf(-3.0 + 4.0 * k as f64 / 9.0)).collect();
    let rs: Vec<f64> = (0..10).map(|k| -3.0 + 6.0 * k as f64 / 9.0).collect();
    let mut worst_identity: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for rho in [0.1, 0.5, 0.9] {
        let prior = PriorParams::new(rho, 0.3, 1.2).unwrap();
        for &s2 in &sigma2s {
            for &r in &rs {
                let (fa, fc) = prior.fa_fc(s2, r).unwrap();
                let h = 1e-4 * s2.sqrt();
                let up = prior.fa_fc(s2, r + h).unwrap().0;
                let down = prior.fa_fc(s2, r - h).unwrap().0;
                let fd = s2 * (up - down) / (2.0 * h);
                worst_identity = worst_identity.max((fc - fd).abs() / fc.abs());
                let (qa, qc) = prior_moments_by_quadrature(&prior, s2, r);
                let err_a = (fa - qa).abs() / qa.abs().max(1.0);
                let err_c = (fc - qc).abs() / qc.abs().max(1.0);
                worst_quad = worst_quad.max(err_a).max(err_c);
            }
        }
    }
    outcome(
        worst_identity < 1e-5 && worst_quad < 1e-8,
        format!("max rel err of identity {worst_identity:.2e}; max err against quadrature {worst_quad:.2e}"),
    )
}

fn a5_sign_channel() -> Outcome {
    let ch = OutputChannel::Sign;
    let mut worst_g: f64 = 0.0;
    let mut worst_dg: f64 = 0.0;
    let mut finite = true;
    for v in [0.1f64, 1.0, 10.0] {
        let sd = v.sqrt();
        for y in [-1.0, 1.0] {
            for k in 0..=200 {
                let t = -10.0 + 0.1 * k as f64;
                let omega = t * sd;
                let g = ch.gout(y, omega, v).unwrap();
                let dg = ch.dgout(y, omega, v).unwrap();
                let q = sign_gout_by_quadrature(y, omega, v);
                worst_g = worst_g.max((g - q).abs() / q.abs().max(1e-300));
                let h = 1e-5 * sd;
                let fd = -(ch.gout(y, omega + h, v).unwrap() - ch.gout(y, omega - h, v).unwrap()) / (2.0 * h);
                worst_dg = worst_dg.max((dg - fd).abs() / fd.abs().max(1e-300));
            }
            for k in 0..=800 {
                let t = -40.0 + 0.1 * k as f64;
                let g = ch.gout(y, t * sd, v).unwrap();
                let dg = ch.dgout(y, t * sd, v).unwrap();
                finite &= g.is_finite() && dg.is_finite();
            }
        }
    }
    outcome(
        worst_g < 1e-8 && worst_dg < 1e-5 && finite,
        format!("max rel err gout {worst_g:.2e}, dgout {worst_dg:.2e}; finite to |t| = 40: {finite}"),
    )
}

fn a6_awgn_reduction() -> Outcome {
    let inst = gaussian_instance(300, 600, 3.0, 0.2, 1e-8, 21);
    let solver = Solver::new(&inst);
    let mut a = solver.init_state();
    let mut b = solver.init_state();
    let mut ra = seeded_rng(9);
    let mut rb = seeded_rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        solver.swamp_sweep(&mut a, &mut ra).unwrap();
        solver.gswamp_sweep(&mut b, &mut rb).unwrap();
        for (p, q) in [(&a.x_mean, &b.x_mean), (&a.x_var, &b.x_var), (&a.z_mean, &b.z_mean), (&a.z_var, &b.z_var)] {
            worst = worst.max(max_abs_diff(p, q));
        }
    }
    outcome(worst <= 1e-15, format!("max abs state difference over 30 sweeps {worst:.2e}"))
}

fn a7_bookkeeping() -> Outcome {
    let inst = gaussian_instance(400, 800, 5.0, 0.2, 1e-8, 31);
    let solver = Solver::new(&inst);
    let mut st = solver.init_state();
    let mut rng = seeded_rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        solver.swamp_sweep(&mut st, &mut rng).unwrap();
        let (mean, var) = solver.recompute_projection(&st);
        let scale_m = mean.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let scale_v = var.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        worst = worst
            .max(max_abs_diff(&mean, &st.z_mean) / scale_m)
            .max(max_abs_diff(&var, &st.z_var) / scale_v);
    }
    outcome(worst < 1e-9, format!("max relative drift over 10 sweeps {worst:.2e}"))
}

fn a8_group_testing() -> Outcome {
    let spec = ExperimentSpec {
        n: 500,
        row_weight: 7,
        ms: vec![50, 75, 100, 125, 150],
        ks: vec![2, 5, 10, 15, 20],
        trials: 20,
        // every item tested at least twice; uniform pools leave some untested
        balanced_pools: true,
        ..ExperimentSpec::defaults(Family::PoolingPhase)
    };
    let results = run_experiment(&spec, |_, _| {}).unwrap();
    let phase = tabulate_phase(&spec, &results).unwrap();
    let sw = &phase.fraction[&Algorithm::Swamp];
    let amp = &phase.fraction[&Algorithm::Amp];
    let k10 = spec.ks.iter().position(|&k| k == 10).unwrap();
    let witness = (0..spec.ms.len()).find(|&mi| sw[mi][k10] >= 0.9 && amp[mi][k10] < 0.5);
    let inversions: Vec<usize> = sw
        .iter()
        .map(|row| row.windows(2).filter(|w| w[1] > w[0]).count())
        .collect();
    let monotone = inversions.iter().all(|&c| c <= 1);
    let column: Vec<String> = spec
        .ms
        .iter()
        .enumerate()
        .map(|(mi, m)| format!("M={m}: {:.2}/{:.2}", sw[mi][k10], amp[mi][k10]))
        .collect();
    outcome(
        witness.is_some() && monotone,
        format!(
            "K=10 success swamp/amp [{}]; inversions per row {inversions:?}",
            column.join(", ")
        ),
    )
}

fn a9_onebit() -> Outcome {
    let spec = ExperimentSpec {
        n: 512,
        rho: 0.125,
        gamma: 20.0,
        alphas: vec![1.0, 2.0, 3.0],
        trials: 20,
        ..ExperimentSpec::defaults(Family::OnebitAlphaSweep)
    };
    let results = run_experiment(&spec, |_, _| {}).unwrap();
    let med = |cell: usize, alg: Algorithm| {
        median(
            results
                .iter()
                .filter(|r| r.cell.index == cell)
                .filter_map(|r| r.outcome(alg))
                .map(|o| if o.normalized_mse.is_finite() { o.normalized_mse } else { f64::MAX })
                .collect(),
        )
    };
    let gs: Vec<f64> = (0..3).map(|c| med(c, Algorithm::Gswamp)).collect();
    let decreasing = gs.windows(2).all(|w| w[1] < w[0]);
    let converged = count(&results, 2, Algorithm::Gswamp, |o| o.status == SolveStatus::Converged);
    let gamp_div = count(&results, 2, Algorithm::Gamp, |o| o.status == SolveStatus::Diverged);
    let gamp_med = med(2, Algorithm::Gamp);
    let gamp_bad = gamp_div * 2 > spec.trials || gamp_med > 10.0 * gs[2];
    outcome(
        decreasing && converged * 2 > spec.trials && gamp_bad,
        format!(
            "gswamp median nmse {:.3e} / {:.3e} / {:.3e}, converged at alpha=3 {converged}/20; \
             gamp at alpha=3 diverged {gamp_div}/20, median nmse {gamp_med:.3e}",
            gs[0], gs[1], gs[2]
        ),
    )
}

fn a10_timing() -> Outcome {
    let spec = ExperimentSpec {
        ns: vec![250, 500, 1000, 2000],
        alpha: 0.75,
        rho: 0.25,
        density: 0.25,
        iterations: 500,
        ..ExperimentSpec::defaults(Family::Timing)
    };
    let table = timing_benchmark(&spec).unwrap();
    let s_amp = table.slope(Algorithm::Amp).unwrap_or(f64::NAN);
    let s_sw = table.slope(Algorithm::Swamp).unwrap_or(f64::NAN);
    let in_band = |s: f64| (1.7..=2.3).contains(&s);
    let worst_ratio = spec
        .ns
        .iter()
        .map(|&n| {
            table.row(n, Algorithm::Swamp).unwrap().seconds_per_iteration
                / table.row(n, Algorithm::Amp).unwrap().seconds_per_iteration
        })
        .fold(0.0, f64::max);
    outcome(
        in_band(s_amp) && in_band(s_sw) && worst_ratio < 5.0,
        format!("slopes amp {s_amp:.2}, swamp {s_sw:.2}; worst swamp/amp time ratio {worst_ratio:.2}"),
    )
}

fn a11_rbp() -> Outcome {
    let inst = gaussian_instance(25, 50, 0.0, 0.1, 1e-8, child_seed(5, 0, 0));
    let bp = solve(
        &inst,
        &SolveConfig {
            algorithm: Algorithm::Rbp,
            schedule: Schedule::RandomSequential,
            t_max: 2000,
            ..SolveConfig::default()
        },
    )
    .unwrap();
    let sw = solve(&inst, &SolveConfig { t_max: 2000, ..SolveConfig::new(Algorithm::Swamp) }).unwrap();
    let bp_mse = bp.final_mse().unwrap();
    let gap = max_abs_diff(&bp.x_mean, &sw.x_mean).max(max_abs_diff(&bp.x_var, &sw.x_var));
    outcome(
        bp.status == SolveStatus::Converged && bp_mse < 1e-4 && gap < 1e-2,
        format!(
            "r-bp {} after {} iterations, mse {bp_mse:.2e}; max marginal gap to swamp {gap:.2e} (swamp {})",
            bp.status.name(),
            bp.iterations,
            sw.status.name()
        ),
    )
}

type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("A1", "fixed-point coincidence", Duration::from_secs(30), a1_fixed_point),
        ("A2", "nonzero-mean robustness", Duration::from_secs(300), a2_gamma_sweep),
        ("A3", "low-rank robustness", Duration::from_secs(300), a3_eta_sweep),
        ("A4", "prior derivative identity", Duration::from_secs(10), a4_prior_identity),
        ("A5", "sign channel oracle", Duration::from_secs(10), a5_sign_channel),
        ("A6", "AWGN reduction", Duration::from_secs(30), a6_awgn_reduction),
        ("A7", "bookkeeping", Duration::from_secs(30), a7_bookkeeping),
        ("A8", "group testing", Duration::from_secs(600), a8_group_testing),
        ("A9", "1-bit sweep", Duration::from_secs(600), a9_onebit),
        ("A10", "timing", Duration::from_secs(600), a10_timing),
        ("A11", "r-BP oracle", Duration::from_secs(30), a11_rbp),
    ];
    let selected: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        if !selected.is_empty() && !selected.iter().any(|s| s == id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{id} {} {name}: {} [{:.1}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
