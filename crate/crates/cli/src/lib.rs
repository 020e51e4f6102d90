//! Command-line front end for `widthlab-core`.
//!
//! Every subcommand reads a JSON [`RunConfig`], validates it before doing any
//! work, writes JSON (and for width sweeps CSV and SVG) artifacts stamped
//! with the tool version and config hash, and exits with 0 when every check
//! passed, 1 when a checked inequality failed and 2 on usage or
//! configuration errors.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Outcome;
pub use config::{ConfigError, RunConfig};
pub use output::Format;

#[derive(Debug, Parser)]
#[command(name = "widthlab", version, about = "Numerical checks of nonlinear-width lower bounds on manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Width artifact formats; all three when omitted.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Print the constants table for the configured manifold to stdout.
    #[arg(long, global = true)]
    pub constants: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Volume-ratio profile, small-ball bound and shell-ratio sweep.
    VerifyGeometry,
    /// Greedy ball packings against the volume-comparison bounds.
    Pack,
    /// Packing, sign code and family, with membership and separation checks.
    BuildFamily,
    /// Minimum pairwise L1 distance of the family against C1.
    VerifySeparation,
    /// Entropy sandwich for the configured n.
    EntropyCheck,
    /// Brute-force pseudo-dimension of a class with known dimension.
    Pseudodim,
    /// Sample complexity for the configured (epsilon, delta, pdim) triples.
    SampleComplexity,
    /// Width of the family against hypothesis classes over n_list.
    WidthSweep,
    /// Re-render a saved width report.
    Report {
        /// Saved `width.json`; defaults to the one in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyGeometry => "verify-geometry",
            Command::Pack => "pack",
            Command::BuildFamily => "build-family",
            Command::VerifySeparation => "verify-separation",
            Command::EntropyCheck => "entropy-check",
            Command::Pseudodim => "pseudodim",
            Command::SampleComplexity => "sample-complexity",
            Command::WidthSweep => "width-sweep",
            Command::Report { .. } => "report",
        }
    }
}

/// Loads and validates the configuration, applies the flag overrides and
/// runs the subcommand.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    let m = cfg.validate()?;
    if cli.constants {
        let table = widthlab_core::model_space::ConstantsTable::for_manifold(&m, cfg.p, cfg.q);
        // A closed pipe (e.g. `| head`) is not an error for the run itself.
        let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&table)?);
    }
    let mut formats = cli.format.clone();
    if formats.is_empty() {
        formats = vec![Format::Csv, Format::Json, Format::Svg];
    }
    formats.sort();
    formats.dedup();
    let out = cfg.out.clone();
    match &cli.command {
        Command::VerifyGeometry => commands::cmd_verify_geometry(&cfg, &m, &out),
        Command::Pack => commands::cmd_pack(&cfg, &m, &out),
        Command::BuildFamily => commands::cmd_build_family(&cfg, &m, &out),
        Command::VerifySeparation => commands::cmd_verify_separation(&cfg, &m, &out),
        Command::EntropyCheck => commands::cmd_entropy_check(&cfg, &m, &out),
        Command::Pseudodim => commands::cmd_pseudodim(&cfg, &out),
        Command::SampleComplexity => commands::cmd_sample_complexity(&cfg, &out),
        Command::WidthSweep => commands::cmd_width_sweep(&cfg, &m, &out, &formats),
        Command::Report { input } => {
            let input = input.clone().unwrap_or_else(|| out.join("width.json"));
            commands::cmd_report(&input, &out, &formats)
        }
    }
}

/// 2 for configuration problems, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use widthlab_core::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::UnsupportedManifold { .. }
            | E::NonNegativeCurvature(_)
            | E::InvalidParameter { .. }
            | E::GridTooCoarse(_)
            | E::RadiusTooLarge { .. }
            | E::TooManyPoints(_),
        ) => 2,
        _ => 1,
    }
}

/// Sizes the global rayon pool from `WIDTHLAB_THREADS` when set.
pub fn init_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("WIDTHLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError(format!("WIDTHLAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}
