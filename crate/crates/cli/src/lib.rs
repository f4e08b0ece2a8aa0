//! Command-line driver: configuration parsing, single-instance commands,
//! batch scans and record output.

pub mod commands;
pub mod config;
pub mod error;
pub mod records;
pub mod scan;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gns_core::ShiftMode;

pub use commands::{Format, Report};
pub use config::{parse_config, Config};
pub use error::CliError;
pub use records::{parse_record, Record};
pub use scan::{run_scan, ScanOptions};

#[derive(Parser, Debug)]
#[command(name = "gns", version, about = "Generalized number systems over orders of number fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Human,
    Records,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Compose,
    Add,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML configuration file.
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "human")]
    pub format: FormatArg,
    /// Working precision in bits for enclosures.
    #[arg(long)]
    pub precision_bits: Option<u32>,
    /// Maximum number of digits produced by `expand`.
    #[arg(long)]
    pub step_cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the digit set D of p(0).
    Digits(Common),
    /// Decide the finiteness property.
    Decide(Common),
    /// Expand a polynomial, given as `c0;c1;...` with coordinates separated by commas.
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Check the dominant condition.
    Dominant(Common),
    /// Smallest m such that the shifted polynomial satisfies the dominant condition.
    ShiftSearch {
        #[command(flatten)]
        common: Common,
        /// Shift direction as comma-separated coordinates (default 1).
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[arg(long, default_value_t = 50)]
        max_m: u64,
        #[arg(long, value_enum, default_value = "compose")]
        mode: ModeArg,
    },
    /// The h = 1 non-finiteness test for p(x - m - 1), m in min-m..=max-m.
    WitnessFamily {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        min_m: i64,
        #[arg(long, default_value_t = 12)]
        max_m: i64,
    },
    /// Report the interior hypotheses and a tiling check for the domain.
    Hypotheses {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Run the sweep described by the [scan] section.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Resume from and update this checkpoint file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Add per-row wall-clock time to records.
        #[arg(long)]
        timing: bool,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Digits(c) | Command::Decide(c) | Command::Dominant(c) => c,
            Command::Expand { common, .. }
            | Command::ShiftSearch { common, .. }
            | Command::WitnessFamily { common, .. }
            | Command::Hypotheses { common, .. }
            | Command::Scan { common, .. } => common,
        }
    }
}

fn load(common: &Common) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut cfg = parse_config(&text)?;
    if let Some(b) = common.precision_bits {
        cfg.engine.precision_bits = b;
    }
    if let Some(s) = common.step_cap {
        cfg.engine.step_cap = s;
    }
    Ok(cfg)
}

/// Runs a parsed command line, writing the report to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let common = cli.command.common();
    let format = match common.format {
        FormatArg::Human => Format::Human,
        FormatArg::Records => Format::Records,
    };
    let cfg = load(common)?;
    let report = match &cli.command {
        Command::Digits(_) => commands::cmd_digits(&cfg)?,
        Command::Decide(_) => commands::cmd_decide(&cfg)?,
        Command::Expand { value, .. } => commands::cmd_expand(&cfg, value)?,
        Command::Dominant(_) => commands::cmd_dominant(&cfg)?,
        Command::ShiftSearch { direction, max_m, mode, .. } => {
            let mode = match mode {
                ModeArg::Compose => ShiftMode::Compose,
                ModeArg::Add => ShiftMode::Add,
            };
            commands::cmd_shift_search(&cfg, direction.as_deref(), *max_m, mode)?
        }
        Command::WitnessFamily { min_m, max_m, .. } => commands::cmd_witness_family(&cfg, *min_m, *max_m)?,
        Command::Hypotheses { samples, .. } => commands::cmd_hypotheses(&cfg, *samples)?,
        Command::Scan { workers, checkpoint, timing, .. } => {
            let opts = ScanOptions { workers: *workers, checkpoint: checkpoint.clone(), timing: *timing, format };
            run_scan(&cfg, &opts, out)?;
            return Ok(0);
        }
    };
    out.write_all(report.render(format).as_bytes())?;
    Ok(report.code)
}
