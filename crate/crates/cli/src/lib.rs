//! `qns`: experiment runner for the `qspace` laboratory.
//!
//! Each subcommand computes its tables in memory from a materialized
//! configuration and then commits them, with a JSON manifest, into a fresh
//! timestamped directory. `--check` recomputes a committed run from its
//! manifest and compares every file.

pub mod commands;
pub mod config;
pub mod output;

use anyhow::Context;
use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};

use commands::{execute, Command};
use config::{ExperimentConfig, Overrides};
use output::{commit, compare_text, manifest_path, output_root, Manifest};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Relative tolerance of `--check`.
pub const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "qns", version, about = "Critical-space norms and mild Navier-Stokes experiments")]
pub struct Cli {
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root (default: `[output].root`, then `$QNS_OUT`, then `qns-out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Comma-separated alpha list.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Recompute the run described by a manifest and compare.
    #[arg(long, global = true)]
    pub check: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Write corpus fields (or the given specs) as QNSF1 files.
    Gen { specs: Vec<String> },
    /// All-space norm sweep over the corpus and alpha list.
    Norms,
    /// Ratios between the four tent characterisations.
    Equiv,
    /// Morrey, Besov and alpha-ordering inclusion tables.
    Inclusions,
    /// Duhamel inequality checks on the seeded trajectory corpus.
    Lemmas {
        #[arg(long)]
        schur: bool,
    },
    /// Divergence representation of the corpus.
    Divrep,
    /// Picard solve with diagnostics, residual and stepper cross-check.
    Solve,
    /// Decay of the truncated norms as T shrinks.
    Vanish,
}

/// Exit status for an error chain.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(q) = cause.downcast_ref::<qspace::Error>() {
            return match q {
                qspace::Error::Inconsistent(_) | qspace::Error::Diverged(_) | qspace::Error::Unstable(_) => {
                    EXIT_NUMERICAL
                }
                qspace::Error::Io(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            };
        }
        if cause.downcast_ref::<CheckFailed>().is_some() {
            return EXIT_NUMERICAL;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_CONFIG
}

#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Result of a committed run.
#[derive(Debug)]
pub struct RunResult {
    pub dir: PathBuf,
    pub warnings: Vec<String>,
}

fn load_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::parse(&text)?
        }
        None => match cli.seed {
            Some(s) => ExperimentConfig::with_seed(s),
            None => anyhow::bail!("a seed is required: pass --config with `seed = ...` or --seed"),
        },
    };
    config.apply(&Overrides { seed: cli.seed, resolution: cli.resolution, alphas: cli.alpha.clone() });
    Ok(config)
}

fn command_of(sub: &Sub) -> Command {
    match sub {
        Sub::Gen { .. } => Command::Gen,
        Sub::Norms => Command::Norms,
        Sub::Equiv => Command::Equiv,
        Sub::Inclusions => Command::Inclusions,
        Sub::Lemmas { schur } => Command::Lemmas { schur: *schur },
        Sub::Divrep => Command::Divrep,
        Sub::Solve => Command::Solve,
        Sub::Vanish => Command::Vanish,
    }
}

/// Runs one subcommand and commits its outputs.
pub fn run(cli: &Cli) -> anyhow::Result<RunResult> {
    if let Some(n) = cli.threads {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Some(m) = &cli.check {
        check(m)?;
        return Ok(RunResult { dir: m.parent().map(Path::to_path_buf).unwrap_or_default(), warnings: Vec::new() });
    }
    let Some(sub) = &cli.command else { anyhow::bail!("no subcommand given (see --help)") };
    let mut config = load_config(cli)?;
    if let Sub::Gen { specs } = sub {
        if !specs.is_empty() {
            config.corpus.fields = Some(specs.clone());
        }
    }
    let root = output_root(cli.out.as_deref(), &config);
    let config = config.materialize()?;
    let cmd = command_of(sub);
    let outcome = execute(cmd, &config)?;
    let dir = commit(&root, cmd.name(), cmd.flags(), &config, &outcome.artifacts, outcome.warnings.clone())?;
    Ok(RunResult { dir, warnings: outcome.warnings })
}

/// Recomputes the run of `manifest` and compares every listed file at
/// [`CHECK_TOL`].
pub fn check(manifest: &Path) -> anyhow::Result<()> {
    let text = fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let m: Manifest = serde_json::from_str(&text).context("invalid manifest")?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let cmd = Command::parse(&m.subcommand, &m.flags)?;
    let config = m.config.clone().materialize()?;
    if config.hash() != m.config_hash {
        return Err(CheckFailed(format!("config hash {} does not match manifest {}", config.hash(), m.config_hash)).into());
    }
    let outcome = execute(cmd, &config)?;
    if outcome.artifacts.len() != m.files.len() {
        return Err(CheckFailed(format!("{} files recomputed, {} recorded", outcome.artifacts.len(), m.files.len())).into());
    }
    for (a, entry) in outcome.artifacts.iter().zip(&m.files) {
        let name = a.file_name(&m.config_hash);
        if name != entry.name {
            return Err(CheckFailed(format!("file {name} recomputed, {} recorded", entry.name)).into());
        }
        let stored = fs::read_to_string(dir.join(&name)).with_context(|| format!("reading {name}"))?;
        if let Some(diff) = compare_text(&stored, &a.content, CHECK_TOL) {
            return Err(CheckFailed(format!("{name}: {diff}")).into());
        }
    }
    Ok(())
}

/// Manifest file of a committed run directory.
pub fn manifest_of(dir: &Path) -> anyhow::Result<PathBuf> {
    let name = dir.file_name().and_then(|n| n.to_str()).context("run directory name")?;
    let hash = name.rsplit('-').find(|s| s.len() == 12).context("hash in run directory name")?;
    Ok(manifest_path(dir, hash))
}
