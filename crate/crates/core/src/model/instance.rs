use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, MeasurementMatrix, SparseMatrix, StorageKind};
use crate::channels::OutputChannel;
use crate::error::{Error, Result};
use crate::priors::PriorParams;

/// A recovery problem: operator, observations, channel and prior, plus the
/// ground truth when it is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub matrix: MeasurementMatrix,
    pub y: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
    pub channel: OutputChannel,
    pub prior: PriorParams,
    pub seed: Option<u64>,
}

impl ProblemInstance {
    pub fn new(
        matrix: MeasurementMatrix,
        y: Vec<f64>,
        x_true: Option<Vec<f64>>,
        channel: OutputChannel,
        prior: PriorParams,
    ) -> Result<Self> {
        let inst = ProblemInstance {
            matrix,
            y,
            x_true,
            channel,
            prior,
            seed: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.len() != self.m() {
            return Err(Error::Dimension(format!(
                "{} observations for {} rows",
                self.y.len(),
                self.m()
            )));
        }
        if let Some(x) = &self.x_true {
            if x.len() != self.n() {
                return Err(Error::Dimension(format!(
                    "ground truth of length {} for {} columns",
                    x.len(),
                    self.n()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("ground truth"));
            }
        }
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        if self.channel == OutputChannel::Sign && self.y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidParameter(
                "sign-channel observations must be +1 or -1".into(),
            ));
        }
        self.channel.validate()?;
        self.prior.validate()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, &InstanceFile::from(self))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: InstanceFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        file.into_instance()
    }
}

/// On-disk container. Dense matrices store `values` row-major; sparse ones
/// store `entries` as `[row, col, value]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: String,
    pub m: usize,
    pub n: usize,
    pub storage: StorageKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<(usize, usize, f64)>>,
    pub y: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
    pub channel: OutputChannel,
    pub prior: PriorParams,
    pub seed: Option<u64>,
}

pub const INSTANCE_FORMAT: &str = "swamp-instance/1";

impl From<&ProblemInstance> for InstanceFile {
    fn from(inst: &ProblemInstance) -> Self {
        let (values, entries) = match &inst.matrix {
            MeasurementMatrix::Dense(d) => (Some(d.values().to_vec()), None),
            MeasurementMatrix::Sparse(s) => (None, Some(s.triplets_by_row())),
        };
        InstanceFile {
            format: INSTANCE_FORMAT.to_string(),
            m: inst.m(),
            n: inst.n(),
            storage: inst.matrix.storage(),
            values,
            entries,
            y: inst.y.clone(),
            x_true: inst.x_true.clone(),
            channel: inst.channel,
            prior: inst.prior,
            seed: inst.seed,
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<ProblemInstance> {
        if self.format != INSTANCE_FORMAT {
            return Err(Error::Unsupported(format!("instance format '{}'", self.format)));
        }
        let matrix = match self.storage {
            StorageKind::Dense => {
                let values = self
                    .values
                    .ok_or_else(|| Error::Config("dense instance without values".into()))?;
                DenseMatrix::from_row_major(self.m, self.n, values)?.into()
            }
            StorageKind::Sparse => {
                let entries = self
                    .entries
                    .ok_or_else(|| Error::Config("sparse instance without entries".into()))?;
                SparseMatrix::from_triplets(self.m, self.n, &entries)?.into()
            }
        };
        let mut inst = ProblemInstance::new(matrix, self.y, self.x_true, self.channel, self.prior)?;
        inst.seed = self.seed;
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate::{gen_gaussian_iid, gen_pooling, seeded_rng};

    fn prior() -> PriorParams {
        PriorParams::new(0.2, 0.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let phi = gen_gaussian_iid(3, 4, 0.0, &mut seeded_rng(0)).unwrap();
        let ch = OutputChannel::Awgn { delta: 0.1 };
        assert!(ProblemInstance::new(phi.clone(), vec![0.0; 2], None, ch, prior()).is_err());
        assert!(ProblemInstance::new(phi.clone(), vec![0.0; 3], Some(vec![0.0; 3]), ch, prior()).is_err());
        assert!(ProblemInstance::new(phi.clone(), vec![0.5; 3], None, OutputChannel::Sign, prior()).is_err());
        assert!(ProblemInstance::new(phi, vec![1.0, -1.0, 1.0], None, OutputChannel::Sign, prior()).is_ok());
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        for (k, phi) in [
            gen_gaussian_iid(3, 4, 1.0, &mut seeded_rng(1)).unwrap(),
            gen_pooling(4, 9, 3, &mut seeded_rng(2)).unwrap(),
        ]
        .into_iter()
        .enumerate()
        {
            let x = vec![1.0; phi.cols()];
            let y = phi.mul_vec(&x).unwrap();
            let inst = ProblemInstance::new(phi, y, Some(x), OutputChannel::Awgn { delta: 1e-8 }, prior())
                .unwrap()
                .with_seed(77);
            let path = dir.path().join(format!("inst{k}.json"));
            inst.save(&path).unwrap();
            assert_eq!(ProblemInstance::load(&path).unwrap(), inst);
        }
    }
}
