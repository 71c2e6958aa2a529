//! Crate-wide error type.

use crate::genome::{GenomeId, NodeId};
use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network dimensions: {inputs} inputs, {outputs} outputs")]
    InvalidDimensions { inputs: usize, outputs: usize },

    #[error("arity mismatch: expected {expected}, got {got} ({context})")]
    ArityMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("cycle detected in enabled subgraph through nodes {nodes:?}")]
    CycleDetected { nodes: Vec<NodeId> },

    #[error("evaluator produced non-finite fitness for genome {genome}")]
    NonFiniteFitness { genome: GenomeId },

    #[error("evaluator did not assign a fitness to genome {genome}")]
    MissingFitness { genome: GenomeId },

    #[error("all species went extinct and reset_on_extinction is disabled")]
    TotalExtinction,

    #[error("spawn region too small for {n} agents at min separation {min_sep}")]
    SpawnFailed { n: usize, min_sep: f64 },

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("unknown policy `{0}` (expected `designed` or a genome file path)")]
    UnknownPolicy(String),

    #[error("no checkpoint found in {0}")]
    NoCheckpoint(PathBuf),

    #[error("unsupported {kind} version {found} (this build reads version {expected})")]
    UnsupportedVersion {
        kind: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
}
