use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use swamp_core::harness::Manifest;
use swamp_core::{config, solve as run_solver, ProblemInstance, SolveConfig, SolveStatus};

use super::{prepare_out, read_config, seed_warning};
use crate::SolveArgs;

pub const EXIT_DIVERGED: u8 = 2;
pub const EXIT_MAX_ITERS: u8 = 3;

pub fn solve(args: &SolveArgs, command_line: &str) -> Result<ExitCode> {
    let instance = ProblemInstance::load(&args.instance)
        .with_context(|| format!("loading {}", args.instance.display()))?;

    let text = read_config(&args.common)?;
    let mut table = config::parse_table(&text)?;
    for o in &args.common.overrides {
        config::apply_override(&mut table, o)?;
    }
    if let Some(alg) = &args.algorithm {
        config::apply_override(&mut table, &format!("algorithm=\"{alg}\""))?;
    }
    let seed_given = args.common.seed.is_some() || table.contains_key("seed");
    if let Some(seed) = args.common.seed {
        config::apply_override(&mut table, &format!("seed={seed}"))?;
    }
    let cfg: SolveConfig = config::from_table(table).context("invalid solver configuration")?;
    cfg.validate()?;

    let report = run_solver(&instance, &cfg)?;

    let out = &args.common.out;
    prepare_out(out)?;
    report.write_trace_csv(BufWriter::new(File::create(out.join("trace.csv"))?))?;
    report.write_summary_csv(BufWriter::new(File::create(out.join("summary.csv"))?))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(out.join("estimate.csv"))?));
    w.write_record(["index", "mean", "var"])?;
    for (i, (a, v)) in report.x_mean.iter().zip(&report.x_var).enumerate() {
        w.write_record([i.to_string(), format!("{a:e}"), format!("{v:e}")])?;
    }
    w.flush()?;
    let mut manifest = Manifest::new(command_line, &cfg, vec![cfg.seed]);
    if !seed_given {
        eprintln!("warning: {}", seed_warning(cfg.seed));
        manifest = manifest.warn(seed_warning(cfg.seed));
    }
    manifest.write(&out.join("manifest.json"))?;

    let mut stdout = std::io::stdout().lock();
    report.write_summary_csv(&mut stdout)?;
    stdout.flush()?;

    Ok(match report.status {
        SolveStatus::Converged => ExitCode::SUCCESS,
        SolveStatus::Diverged => ExitCode::from(EXIT_DIVERGED),
        SolveStatus::MaxIters => ExitCode::from(EXIT_MAX_ITERS),
    })
}
