use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Result};
use swamp_core::harness::{cells, child_seed, timing_benchmark, ExperimentSpec, Family, Manifest};

use super::experiment::load_spec;
use super::{prepare_out, seed_warning};
use crate::BenchArgs;

/// Runs the timing grid, writes `timing.csv` and prints the fitted slopes.
pub(super) fn run_timing(spec: &ExperimentSpec, out: &Path) -> Result<()> {
    let table = timing_benchmark(spec)?;
    table.write_csv(BufWriter::new(File::create(out.join("timing.csv"))?))?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "algorithm,loglog_slope")?;
    for (alg, slope) in &table.slopes {
        writeln!(stdout, "{},{slope:.4}", alg.name())?;
    }
    for row in &table.rows {
        eprintln!(
            "n={} {}: {:.3e} s/iteration over {} iterations",
            row.n,
            row.algorithm.name(),
            row.seconds_per_iteration,
            row.iterations
        );
    }
    Ok(())
}

pub fn bench(args: &BenchArgs, command_line: &str) -> Result<ExitCode> {
    let mut extra = Vec::new();
    if !args.sizes.is_empty() {
        let list: Vec<String> = args.sizes.iter().map(|n| n.to_string()).collect();
        extra.push(format!("ns=[{}]", list.join(",")));
    }
    if let Some(it) = args.iterations {
        extra.push(format!("iterations={it}"));
    }
    let (spec, seed_given) = load_spec(&args.common, Some("timing"), extra)?;
    if spec.family != Family::Timing {
        bail!("bench runs the timing family only");
    }
    let out = &args.common.out;
    prepare_out(out)?;
    run_timing(&spec, out)?;
    let seeds = cells(&spec).iter().map(|c| child_seed(spec.base_seed, c.index, 0)).collect();
    let mut manifest = Manifest::new(command_line, &spec, seeds);
    if !seed_given {
        manifest = manifest.warn(seed_warning(spec.base_seed));
    }
    manifest.write(&out.join("manifest.json"))?;
    Ok(ExitCode::SUCCESS)
}
