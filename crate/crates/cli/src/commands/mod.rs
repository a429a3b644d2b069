mod bench;
mod experiment;
mod generate;
mod solve;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub use bench::bench;
pub use experiment::experiment;
pub use generate::generate;
pub use solve::solve;

use crate::Common;

/// Invocation problems that should exit with the usage status.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Contents of `--config`, or an empty document.
fn read_config(common: &Common) -> Result<String> {
    match &common.config {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display())),
        None => Ok(String::new()),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn seed_warning(seed: u64) -> String {
    format!("no seed given; defaulted to {seed}")
}
