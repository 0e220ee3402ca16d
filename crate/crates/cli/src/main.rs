mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use cache::Cache;
use commands::{Ctx, Format};

/// Quaternion orders, Brandt modules, ternary theta lifts and twisted central values.
#[derive(Parser)]
#[command(name = "quatlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// prime p (may also be given positionally)
    #[arg(long = "p")]
    p_flag: Option<u64>,
    /// cache directory; defaults to $QUATLIFT_CACHE, no caching when neither is set
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pretty", global = true)]
    format: Format,
    /// digits after the decimal point for real numbers
    #[arg(long, default_value_t = 30, global = true)]
    precision: usize,
    /// write the output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// algebra, maximal order, Õ and O^± with discriminants and class representatives
    Order {
        p: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Õ-classes with their parent, χ and forms, and the ternary form lists
    Tables {
        p: Option<u64>,
        /// JSON with "plus" and "minus" coefficient lists to cross-reference by equivalence
        #[arg(long)]
        expect: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Brandt matrices B_m for m <= bound and the rational eigencomponents
    Brandt {
        p: Option<u64>,
        #[arg(long, default_value_t = 10)]
        bound: u64,
        /// use the classes of Õ instead of the maximal order
        #[arg(long)]
        tilde: bool,
        #[command(flatten)]
        common: Common,
    },
    /// weight-3/2 lifts with their heights, theta combinations and coefficients
    Lift {
        p: Option<u64>,
        label: Option<String>,
        #[arg(long, default_value_t = 200)]
        bound: u64,
        /// include the lifts from the maximal order
        #[arg(long)]
        gross: bool,
        #[command(flatten)]
        common: Common,
    },
    /// (d, c(d), L) tables
    Lvalues {
        p: Option<u64>,
        label: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        common: Common,
    },
    /// run the whole pipeline and check the constants; exits nonzero on failure
    Verify {
        p: Option<u64>,
        label: Option<String>,
        /// every form at the level (the default without a label)
        #[arg(long, conflicts_with = "label")]
        all: bool,
        /// fail unless k is within 1e-9 (relative) of this value
        #[arg(long)]
        expect_k: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Copy)]
struct RunArgs {
    #[arg(long, default_value_t = 200)]
    dmax: u64,
    /// theta bound, at least dmax
    #[arg(long, default_value_t = 200)]
    bound: u64,
    /// also check the level-p formula against the maximal-order lifts
    #[arg(long)]
    gross: bool,
}

fn prime(pos: Option<u64>, common: &Common) -> Result<u64> {
    match (pos, common.p_flag) {
        (Some(a), Some(b)) if a != b => Err(anyhow!("p given twice: {a} and {b}")),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(anyhow!("a prime p is required")),
    }
}

fn ctx(common: &Common) -> Ctx {
    Ctx { cache: Cache::new(common.cache_dir.clone()), format: common.format, precision: common.precision }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => cache::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Order { p, common } => (common, commands::cmd_order(&ctx(common), prime(*p, common)?)),
        Command::Tables { p, expect, common } => (common, commands::cmd_tables(&ctx(common), prime(*p, common)?, expect.as_deref())),
        Command::Brandt { p, bound, tilde, common } => (common, commands::cmd_brandt(&ctx(common), prime(*p, common)?, *bound, *tilde)),
        Command::Lift { p, label, bound, gross, common } => {
            (common, commands::cmd_lift(&ctx(common), prime(*p, common)?, label.as_deref(), *bound, *gross))
        }
        Command::Lvalues { p, label, run, common } => {
            (common, commands::cmd_lvalues(&ctx(common), prime(*p, common)?, label.as_deref(), run.dmax, run.bound, run.gross))
        }
        Command::Verify { p, label, all: _, expect_k, run, common } => {
            let v = commands::cmd_verify(
                &ctx(common),
                prime(*p, common)?,
                label.as_deref(),
                run.dmax,
                run.bound,
                run.gross,
                expect_k.as_deref(),
            )?;
            emit(common, &v.output)?;
            for f in &v.failures {
                eprintln!("verify: {f}");
            }
            return Ok(v.failures.is_empty());
        }
    };
    emit(common, &result?)?;
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
