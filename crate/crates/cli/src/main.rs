//! `hierarch`: command-line front end for substitution subshifts and
//! Fibonacci tilings. Every command prints one JSON report on stdout.
//!
//! Exit codes: 0 when the report is verified, 1 when a verification failed,
//! 2 on usage, parse or precondition errors.

mod commands;
mod report;
mod schema;
mod svg;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Module(hierarch::Error),
}

impl CliError {
    pub fn parse(e: impl fmt::Display) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<hierarch::Error> for CliError {
    fn from(e: hierarch::Error) -> Self {
        CliError::Module(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Module(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "hierarch", version, about = "Substitution subshifts and Fibonacci tilings with exact checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Side {
    /// Unit squares in seeded Fibonacci rows.
    X,
    /// The conjugated rows with widths tau and tau - 1.
    Y,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TilingKind {
    /// A seeded Fibonacci tiling.
    Line,
    /// Unit tiles with a boundary at the origin.
    Unit,
    Product,
    Rows,
    FrameFixture,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a substitution on one letter.
    Substitute {
        #[arg(long)]
        rules: String,
        #[arg(long)]
        letter: String,
        #[arg(long)]
        level: usize,
        /// Write an SVG of the patch with supertile outlines.
        #[arg(long)]
        render: Option<String>,
    },
    /// Enumerate words of length m (1D) or windows of radius n (2D).
    Language {
        #[arg(long)]
        rules: String,
        #[arg(long, conflicts_with = "radius")]
        length: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Refute every periodic configuration up to a period cap.
    Aperiodic {
        #[arg(long)]
        rules: String,
        #[arg(long)]
        period_cap: usize,
        #[arg(long)]
        m_cap: usize,
    },
    /// Certify that X_n is strictly larger than the subshift.
    Separation {
        /// Defaults to the product of the Fibonacci substitution with itself.
        #[arg(long)]
        rules: Option<String>,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        m_cap: Option<usize>,
        /// Fundamental domain of a 1D periodic configuration.
        #[arg(long)]
        config: Option<String>,
    },
    /// Conjugate a Fibonacci tiling to other tile lengths, or build a
    /// witness that the conjugacy is not a sliding block code.
    Conjugate {
        /// Tile lengths: a tiles file or "a,b".
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, conflicts_with_all = ["witness"])]
        tiling: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Witness radius R.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long, default_value = "1e-8")]
        precision: String,
    },
    /// Tiling metric between two line tilings.
    Metric {
        a: String,
        b: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Distinct row-edge offsets on the conjugated rows system.
    Offsets {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        radius: String,
        /// Offsets closer than this are identified.
        #[arg(long, default_value = "1e-6")]
        resolution: String,
        #[arg(long, default_value = "1e-8")]
        precision: String,
    },
    /// Count radius-R neighbourhood classes of a rows patch.
    Census {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        rows: usize,
        /// Half width of the patch.
        #[arg(long)]
        width: String,
        #[arg(long)]
        radius: String,
        #[arg(long)]
        budget: usize,
        #[arg(long, value_enum)]
        side: Side,
        #[arg(long, default_value = "1e-8")]
        precision: String,
    },
    /// Check for a periodic frame spanned by s and t.
    Frame {
        #[arg(long)]
        tiling: String,
        /// "x,y"
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// List the tiles of a tiling within radius R of the origin.
    Patch {
        #[arg(long)]
        tiling: String,
        #[arg(long)]
        radius: String,
        #[arg(long)]
        render: Option<String>,
    },
    /// Write a tiling file.
    Tiling {
        #[arg(long, value_enum)]
        kind: TilingKind,
        /// Tile lengths: a tiles file or "a,b". Defaults to "1,tau".
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        rows: usize,
        #[arg(long, default_value = "40")]
        horizon: String,
        /// Move a line tiling by this amount.
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
    },
    /// Re-validate the certificate embedded in a separation or aperiodic
    /// report.
    CheckCertificate {
        report: String,
        #[arg(long)]
        rules: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    use commands::*;
    let report = match cli.command {
        Command::Substitute {
            rules,
            letter,
            level,
            render,
        } => substitute(&rules, &letter, level, render.as_deref())?,
        Command::Language { rules, length, radius } => language(&rules, length, radius)?,
        Command::Aperiodic {
            rules,
            period_cap,
            m_cap,
        } => aperiodic(&rules, period_cap, m_cap)?,
        Command::Separation {
            rules,
            radius,
            m_cap,
            config,
        } => separation(rules.as_deref(), radius, m_cap, config.as_deref())?,
        Command::Conjugate {
            from,
            to,
            tiling,
            seed,
            witness,
            precision,
        } => conjugate(&from, &to, tiling.as_deref(), seed, witness.as_deref(), &precision)?,
        Command::Metric { a, b, cap } => metric(&a, &b, cap)?,
        Command::Offsets {
            seed,
            rows,
            radius,
            resolution,
            precision,
        } => offsets(seed, rows, &radius, &resolution, &precision)?,
        Command::Census {
            seed,
            rows,
            width,
            radius,
            budget,
            side,
            precision,
        } => census(seed, rows, &width, &radius, budget, side, &precision)?,
        Command::Frame { tiling, s, t } => frame(&tiling, &s, &t)?,
        Command::Patch { tiling, radius, render } => patch(&tiling, &radius, render.as_deref())?,
        Command::Tiling {
            kind,
            spec,
            seed,
            rows,
            horizon,
            translate,
        } => return Ok((tiling_file(kind, spec.as_deref(), seed, rows, &horizon, translate.as_deref())?, true)),
        Command::CheckCertificate { report, rules } => check_certificate(&report, rules.as_deref())?,
    };
    Ok((report.render(), report.is_verified()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, verified)) => {
            print!("{text}");
            if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
