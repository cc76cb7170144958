//! Command-line runner.
//!
//! Flags are gathered into an [`ExperimentConfig`], the same structure read
//! by `run --config`. Every artifact embeds the config, the library version
//! and the SHA-256 of the serialized config. Exit codes: 0 success, 2
//! invalid input or failed verification, 3 numeric non-convergence.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use config::{ExperimentConfig, FamilyKind, Format, MethodKind, Params, SparsifierKind};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "normloc", version, about = "Metric sparsification and operator norm localization experiments")]
struct Cli {
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Artifact path; standard output if omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric space files
    Space {
        #[command(subcommand)]
        action: SpaceAction,
    },
    /// Cluster decompositions of measures
    Sparsify {
        #[command(subcommand)]
        action: SparsifyAction,
    },
    /// Localization of finite-propagation operators
    Onl {
        #[command(subcommand)]
        action: OnlAction,
    },
    /// Graph families and spectral experiments
    Expander {
        #[command(subcommand)]
        action: ExpanderAction,
    },
    /// Run an experiment described by a JSON config file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum SpaceAction {
    /// Check the metric axioms
    Validate(Flat),
    /// Shortest-path (box) space of a graph or family
    Build(Flat),
}

#[derive(Debug, Subcommand)]
enum SparsifyAction {
    /// Run a sparsifier and verify its output
    Run(Flat),
    /// Verify a decomposition file
    Verify(Flat),
    /// Best decomposition by exhaustive search
    Oracle(Flat),
    /// Worst-case measure and best constant
    Game(Flat),
}

#[derive(Debug, Subcommand)]
enum OnlAction {
    /// Localize one operator (sparsifier with `--m`, supports with `--R`)
    Localize(Flat),
    /// Minimum localized ratio over random band operators
    Estimate(Flat),
}

#[derive(Debug, Subcommand)]
enum ExpanderAction {
    /// Spectra, Cheeger constants and approximant degrees
    Report(Flat),
    /// Localization decay table of a family
    Decay(Flat),
}

#[derive(Debug, clap::Args)]
struct Flat {
    #[command(flatten)]
    params: Params,
}

pub(crate) enum Payload {
    Json(Value),
    Table { header: Vec<String>, rows: Vec<Vec<String>> },
}

pub(crate) struct Outcome {
    payload: Payload,
    exit: i32,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Invalid(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::NoConvergence { .. }) => EXIT_NO_CONVERGENCE,
            _ => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(s) => f.write_str(s),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn config_from(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let (command, params) = match cli.command {
        Command::Run { config } => {
            let mut cfg = commands::load_config(&config)?;
            cfg.seed = cli.seed.or(cfg.seed);
            cfg.out = cli.out.or(cfg.out);
            cfg.format = cli.format.unwrap_or(cfg.format);
            cfg.threads = cli.threads.or(cfg.threads);
            return Ok(cfg);
        }
        Command::Space { action } => match action {
            SpaceAction::Validate(f) => ("space validate", f.params),
            SpaceAction::Build(f) => ("space build", f.params),
        },
        Command::Sparsify { action } => match action {
            SparsifyAction::Run(f) => ("sparsify run", f.params),
            SparsifyAction::Verify(f) => ("sparsify verify", f.params),
            SparsifyAction::Oracle(f) => ("sparsify oracle", f.params),
            SparsifyAction::Game(f) => ("sparsify game", f.params),
        },
        Command::Onl { action } => match action {
            OnlAction::Localize(f) => ("onl localize", f.params),
            OnlAction::Estimate(f) => ("onl estimate", f.params),
        },
        Command::Expander { action } => match action {
            ExpanderAction::Report(f) => ("expander report", f.params),
            ExpanderAction::Decay(f) => ("expander decay", f.params),
        },
    };
    Ok(ExperimentConfig {
        command: command.to_string(),
        params,
        seed: cli.seed,
        out: cli.out,
        format: cli.format.unwrap_or_default(),
        threads: cli.threads,
    })
}

/// SHA-256 of the serialized config, hex encoded.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Renders the artifact bytes for a payload.
fn render(cfg: &ExperimentConfig, payload: Payload) -> Result<Vec<u8>, CliError> {
    let hash = config_hash(cfg);
    match payload {
        Payload::Json(result) => {
            let doc = json!({
                "normloc_version": VERSION,
                "config_hash": hash,
                "config": cfg,
                "result": result,
            });
            let mut out = serde_json::to_vec_pretty(&doc).expect("artifact serializes");
            out.push(b'\n');
            Ok(out)
        }
        Payload::Table { header, rows } => {
            let mut out = Vec::new();
            writeln!(out, "# normloc_version: {VERSION}").expect("write to memory");
            writeln!(out, "# config_hash: {hash}").expect("write to memory");
            writeln!(out, "# config: {}", serde_json::to_string(cfg).expect("config serializes")).expect("write to memory");
            let mut w = csv::Writer::from_writer(out);
            let io_err = |e: csv::Error| CliError::Invalid(e.to_string());
            w.write_record(&header).map_err(io_err)?;
            for r in &rows {
                w.write_record(r).map_err(io_err)?;
            }
            w.into_inner().map_err(|e| CliError::Invalid(e.to_string()))
        }
    }
}

fn run(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let outcome = commands::execute(cfg)?;
    let bytes = render(cfg, outcome.payload)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Invalid(e.to_string()))?,
    }
    Ok(outcome.exit)
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match config_from(cli).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("normloc: {e}");
            e.exit_code()
        }
    }
}
