use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use anyhow::{Context, Result};
use swamp_core::harness::{
    cells, child_seed, emit_csv, run_experiment, tabulate_phase, ExperimentSpec, Family, Manifest,
};

use super::{prepare_out, read_config, seed_warning, UsageError};
use crate::{Common, ExperimentArgs};

/// Parses the spec from `--config`, then `extra` overrides, then `--set`.
/// `default_family` is used when the file does not name one.
pub(super) fn load_spec(
    common: &Common,
    default_family: Option<&str>,
    extra: Vec<String>,
) -> Result<(ExperimentSpec, bool)> {
    let text = read_config(common)?;
    let file = swamp_core::config::parse_table(&text)?;
    let in_file = file.contains_key("base_seed");
    let mut overrides = Vec::new();
    if let (false, Some(f)) = (file.contains_key("family"), default_family) {
        overrides.push(format!("family=\"{f}\""));
    }
    overrides.extend(extra);
    overrides.extend(common.overrides.iter().cloned());
    if let Some(seed) = common.seed {
        overrides.push(format!("base_seed={seed}"));
    }
    let seed_given = in_file || overrides.iter().any(|o| o.trim_start().starts_with("base_seed"));
    let spec = ExperimentSpec::from_toml(&text, &overrides).context("invalid experiment specification")?;
    Ok((spec, seed_given))
}

pub fn experiment(args: &ExperimentArgs, command_line: &str) -> Result<ExitCode> {
    if args.common.config.is_none() && args.family.is_none() {
        return Err(UsageError("experiment needs --config or --family".into()).into());
    }
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(UsageError("--workers must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("configuring worker threads")?;
    }
    let family = args.family.iter().map(|f| format!("family=\"{f}\"")).collect();
    let (spec, seed_given) = load_spec(&args.common, None, family)?;
    let out = &args.common.out;
    prepare_out(out)?;

    let grid = cells(&spec);
    let trials = if spec.family == Family::Timing { 1 } else { spec.trials };
    let seeds: Vec<u64> = grid
        .iter()
        .flat_map(|c| (0..trials).map(move |t| child_seed(spec.base_seed, c.index, t)))
        .collect();

    if spec.family == Family::Timing {
        super::bench::run_timing(&spec, out)?;
    } else {
        let total = grid.len();
        let results = run_experiment(&spec, |cell, rows| {
            let tallies: Vec<String> = spec
                .algorithms
                .iter()
                .map(|&alg| {
                    let ok = rows.iter().filter_map(|r| r.outcome(alg)).filter(|o| o.success).count();
                    format!("{} {ok}/{}", alg.name(), rows.len())
                })
                .collect();
            eprintln!(
                "[{}/{total}] n={} m={} {}: {}",
                cell.index + 1,
                cell.n,
                cell.m,
                describe(&spec, cell),
                tallies.join(", ")
            );
        })?;
        emit_csv(&results, &spec.algorithms, &out.join("results.csv"))?;
        if spec.family == Family::PoolingPhase {
            let phase = tabulate_phase(&spec, &results)?;
            phase.write_csv(BufWriter::new(File::create(out.join("phase.csv"))?))?;
            phase.write_contour_csv(BufWriter::new(File::create(out.join("contour.csv"))?))?;
        }
    }

    let mut manifest = Manifest::new(command_line, &spec, seeds);
    if !seed_given {
        eprintln!("warning: {}", seed_warning(spec.base_seed));
        manifest = manifest.warn(seed_warning(spec.base_seed));
    }
    manifest.write(&out.join("manifest.json"))?;
    Ok(ExitCode::SUCCESS)
}

fn describe(spec: &ExperimentSpec, cell: &swamp_core::harness::Cell) -> String {
    match spec.family {
        Family::GammaSweep | Family::OnebitAlphaSweep => format!("gamma={}", cell.gamma.unwrap_or_default()),
        Family::EtaSweep => format!("eta={}", cell.eta.unwrap_or_default()),
        Family::PoolingPhase => format!("k={}", cell.k.unwrap_or_default()),
        Family::Timing => String::new(),
    }
}
