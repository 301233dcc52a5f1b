//! `moduli`: compute, verify and tabulate intersection Poincaré polynomials.
//!
//! Exit status: 0 on success, 1 when a computation or verification fails,
//! 2 on invalid usage.

mod cache;
mod commands;
mod output;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moduli_core::combinat::Partition;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "moduli", version, about = "Intersection Poincaré polynomials of moduli of bundles on curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Cache directory (overrides MODULI_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// IP_t(M_0(r)), or its Hodge refinement with --hodge.
    Ip {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        hodge: bool,
        /// JSON table of smooth-space polynomials overriding the built-in ones.
        #[arg(long)]
        smooth_table: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Poincaré polynomial f(rho) of the fiber over a stratum.
    Fiber {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        rho: Partition,
        #[arg(long, value_enum, default_value = "recursion")]
        method: FiberMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Stalk polynomial g(rho), computed from the graph model at a chosen root.
    Stalk {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        rho: Partition,
        /// Root vertex, numbered from 1.
        #[arg(long, default_value_t = 1)]
        root: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Hilbert function of the local system L_rho.
    Lhilb {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        rho: Partition,
        #[arg(long, value_enum, default_value = "closed")]
        method: LhilbMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Poincaré (or Hodge) polynomial of the smooth space M_1(r).
    Smooth {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        hodge: bool,
        /// Emit the whole table for ranks 1..=rank in the smooth-table file format.
        #[arg(long)]
        export: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite; prints a JSON report and a summary on stderr.
    Verify {
        /// Genus or inclusive range, e.g. `2` or `2..3`.
        #[arg(long, value_parser = parse_range)]
        genus: RangeInclusive<u32>,
        #[arg(long)]
        max_rank: u32,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Write one file per genus and kind into a directory.
    Table {
        #[arg(long, value_parser = parse_range)]
        genus: RangeInclusive<u32>,
        #[arg(long)]
        max_rank: u32,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FiberMethod {
    Recursion,
    Graphs,
    Identity,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LhilbMethod {
    Closed,
    Subtraction,
    All,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let bad = || format!("expected N or A..B, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

/// Failures caused by the invocation rather than by a computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<moduli_core::Error>() {
            return if e.is_usage() || matches!(e, moduli_core::Error::Schema(_)) { 2 } else { 1 };
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Ip {
            genus,
            rank,
            hodge,
            smooth_table,
            common,
        } => commands::ip(genus, rank, hodge, smooth_table.as_deref(), &common),
        Command::Fiber {
            genus,
            rho,
            method,
            common,
        } => commands::fiber(genus, &rho, method, &common),
        Command::Stalk {
            genus,
            rho,
            root,
            common,
        } => commands::stalk(genus, &rho, root, &common),
        Command::Lhilb {
            genus,
            rho,
            method,
            common,
        } => commands::lhilb(genus, &rho, method, &common),
        Command::Smooth {
            genus,
            rank,
            hodge,
            export,
            common,
        } => commands::smooth(genus, rank, hodge, export, &common),
        Command::Verify {
            genus,
            max_rank,
            cache_dir,
        } => commands::verify(genus, max_rank, cache_dir.as_deref()),
        Command::Table {
            genus,
            max_rank,
            out_dir,
            common,
        } => commands::table(genus, max_rank, &out_dir, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
