use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use swamp_core::config;
use swamp_core::harness::Manifest;
use swamp_core::model::{gen_binary_signal, gen_signal, measure, seeded_rng, EnsembleKind, EnsembleSpec};
use swamp_core::{OutputChannel, PriorParams, ProblemInstance};

use super::{prepare_out, read_config, seed_warning};
use crate::GenerateArgs;

/// How the true signal is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalKind {
    /// I.i.d. draws from the prior.
    #[default]
    Prior,
    /// Exactly `k` ones at uniformly chosen positions.
    Binary { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub seed: Option<u64>,
    pub m: usize,
    pub n: usize,
    pub ensemble: EnsembleKind,
    pub prior: PriorParams,
    pub channel: OutputChannel,
    #[serde(default)]
    pub signal: SignalKind,
}

pub fn generate(args: &GenerateArgs, command_line: &str) -> Result<ExitCode> {
    let text = read_config(&args.common)?;
    let mut table = config::parse_table(&text)?;
    for o in &args.common.overrides {
        config::apply_override(&mut table, o)?;
    }
    let mut cfg: GenerateConfig = config::from_table(table).context("invalid generate configuration")?;
    if let Some(seed) = args.common.seed {
        cfg.seed = Some(seed);
    }
    let defaulted = cfg.seed.is_none();
    let seed = cfg.seed.unwrap_or(0);
    cfg.seed = Some(seed);

    let mut rng = seeded_rng(seed);
    let matrix = EnsembleSpec { kind: cfg.ensemble, m: cfg.m, n: cfg.n, seed }.generate_with(&mut rng)?;
    let x = match cfg.signal {
        SignalKind::Prior => gen_signal(cfg.n, &cfg.prior, &mut rng)?,
        SignalKind::Binary { k } => gen_binary_signal(cfg.n, k, &mut rng)?,
    };
    let y = measure(&matrix, &x, &cfg.channel, &mut rng)?;
    let instance = ProblemInstance::new(matrix, y, Some(x), cfg.channel, cfg.prior)?.with_seed(seed);

    let out = &args.common.out;
    prepare_out(out)?;
    instance.save(&out.join("instance.json"))?;
    if args.matrix_csv {
        let file = File::create(out.join("matrix.csv"))?;
        instance.matrix.write_csv(BufWriter::new(file))?;
    }
    let mut manifest = Manifest::new(command_line, &cfg, vec![seed]);
    if defaulted {
        eprintln!("warning: {}", seed_warning(seed));
        manifest = manifest.warn(seed_warning(seed));
    }
    manifest.write(&out.join("manifest.json"))?;
    eprintln!(
        "wrote {}x{} instance to {}",
        cfg.m,
        cfg.n,
        out.join("instance.json").display()
    );
    Ok(ExitCode::SUCCESS)
}
