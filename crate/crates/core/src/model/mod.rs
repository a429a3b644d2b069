//! Problem instances, measurement operators and random ensembles.

mod generate;
mod instance;
mod matrix;

pub use generate::{
    gen_binary_signal, gen_gaussian_iid, gen_lowrank, gen_pooling, gen_pooling_balanced,
    gen_signal, gen_sparse_gaussian, lowrank_inner_dim, measure, seeded_rng, EnsembleKind,
    EnsembleSpec,
};
pub use instance::{InstanceFile, ProblemInstance, INSTANCE_FORMAT};
pub use matrix::{DenseMatrix, MeasurementMatrix, SparseMatrix, StorageKind};
