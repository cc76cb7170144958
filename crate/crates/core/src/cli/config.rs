use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FamilyKind {
    Cycles,
    Paths,
    Complete,
    Torus,
    RandomRegular,
    Sl2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SparsifierKind {
    Interval,
    Grid,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Chebyshev,
    Heat,
}

/// Command parameters. Each command reads the fields it needs and rejects
/// a missing one; the same names are used on the command line and in
/// configuration files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Metric space file
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<PathBuf>,
    /// Measure file (JSON array of weights)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<PathBuf>,
    /// Decomposition file to verify
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<PathBuf>,
    /// Operator file (JSON or binary)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<PathBuf>,
    /// Graph edge-list file
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    /// Graph family
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyKind>,
    /// Family member sizes (tori are square)
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    /// Primes for the SL(2, Z/p) family
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    /// Vertex degree for random regular graphs
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Gap scale for box spaces
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Separation parameter
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Number of residue classes
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Support diameter bound
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Propagation of sampled operators
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Approximation error
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Fiber dimension
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    /// Number of sampled operators
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Cluster diameter bound for verification
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dmax: Option<f64>,
    /// Mass fraction for verification
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Approximant construction
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodKind>,
    /// Sparsifier for `sparsify run`
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsifier: Option<SparsifierKind>,
    /// Use balls B(x, R) instead of diameter-bounded supports
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ball: bool,
}

/// A complete experiment: the command, its parameters and the run settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Two words, e.g. `"sparsify game"`.
    pub command: String,
    #[serde(default)]
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Not part of the recorded config: results do not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
}
