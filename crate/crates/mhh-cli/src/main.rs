//! Command-line interface to the trigraded Tor computations: dimension
//! tables, named verification suites, Hilbert tables, and bidegree charts
//! of the étale, reduced, and integral rings.
//!
//! Exit codes: 0 on success, 1 when a verification suite reports failures,
//! 2 on usage or configuration errors (bad primes, unknown suites or rings,
//! empty weight windows, unreadable config files).

mod chart;
mod config;
mod emit;

use clap::{Parser, Subcommand};

use mhh_core::bar::{BarAlgebra, BarComplex};
use mhh_core::check::{run_suite, CheckParams};
use mhh_core::fp::Fp;
use mhh_core::rings::{EtaleRing, IntegralRing, ReducedRing};
use mhh_core::steenrod::{SteenrodAlgebra, Variant};
use mhh_core::table::BidegreeTable;

use config::{parse_variant, CommonArgs, RunConfig};
use emit::write_output;

/// Why a run stopped: misuse (exit 2) or honest verification failure (1).
pub enum Failure {
    Usage(String),
    Verify(String),
}

impl From<mhh_core::Error> for Failure {
    fn from(e: mhh_core::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "mhh",
    version,
    about = "Trigraded Tor tables, ring charts, and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a trigraded Tor dimension table for the chosen variant.
    Tor {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Run a named verification suite and print its JSON report.
    Verify {
        /// Suite name; pass an unknown name to see the list.
        suite: String,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Draw an SVG bidegree chart of one ring: etale, reduced, or integral.
    Chart {
        /// One of: etale, reduced, integral.
        ring: String,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Print the bigraded Hilbert table of one ring.
    Hilbert {
        /// One of: etale, reduced, integral.
        ring: String,
        #[command(flatten)]
        args: CommonArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {}
        Err(Failure::Verify(msg)) => {
            eprintln!("{msg}");
            std::process::exit(1);
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Tor { args } => cmd_tor(&RunConfig::resolve(&args)?),
        Command::Verify { suite, args } => {
            cmd_verify(&suite, &RunConfig::resolve(&args)?)
        }
        Command::Chart { ring, args } => {
            cmd_chart(&ring, &RunConfig::resolve(&args)?)
        }
        Command::Hilbert { ring, args } => {
            cmd_hilbert(&ring, &RunConfig::resolve(&args)?)
        }
    }
}

fn cmd_tor(cfg: &RunConfig) -> Result<(), Failure> {
    let format = cfg.format_or("tsv", &["tsv", "json"])?;
    let fp = Fp::new(cfg.prime)?;
    let variant = parse_variant(&cfg.variant)?;
    // Mod τ^{p−1} tables are finite without a weight window; the other two
    // variants have τ-towers, so an unbounded request gets the default
    // window instead of an infinite-region error.
    let window = if cfg.window_given() || variant != Variant::ModTau {
        Some(cfg.window()?)
    } else {
        None
    };
    let alg = SteenrodAlgebra::for_degree(fp, variant, cfg.stem_max)?;
    let complex = BarComplex::new(BarAlgebra::steenrod(alg));
    let mut table = complex.tor_table(cfg.stem_max, window)?;
    if let Some(fmax) = cfg.filtration_max {
        table = table.restrict(|t| t.f <= fmax);
    }
    let text = match format.as_str() {
        "tsv" => emit::tor_tsv(&table),
        _ => emit::tor_json(&table)?,
    };
    write_output(cfg.out.as_deref(), &text)
}

fn cmd_verify(suite: &str, cfg: &RunConfig) -> Result<(), Failure> {
    cfg.format_or("json", &["json"])?;
    let fp = Fp::new(cfg.prime)?;
    let mut params = CheckParams::new(fp);
    params.stem_max = cfg.stem_max;
    let (w_min, w_max) = cfg.window()?;
    params.w_min = w_min;
    params.w_max = w_max;
    params.f_support_max = cfg.f_support_max;
    params.f_value_max = cfg.f_value_max;
    params.seed = cfg.seed;
    let report = run_suite(suite, &params)?;
    let text = emit::json_string(&report)?;
    write_output(cfg.out.as_deref(), &text)?;
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "{}: {} of {} checks failed",
            report.suite,
            report.failures.len(),
            report.cells_checked
        )))
    }
}

fn cmd_hilbert(ring: &str, cfg: &RunConfig) -> Result<(), Failure> {
    let format = cfg.format_or("tsv", &["tsv", "json"])?;
    let table = hilbert_table(ring, cfg)?;
    let text = match format.as_str() {
        "tsv" => emit::hilbert_tsv(&table),
        _ => emit::hilbert_json(&table)?,
    };
    write_output(cfg.out.as_deref(), &text)
}

fn hilbert_table(ring: &str, cfg: &RunConfig) -> Result<BidegreeTable, Failure> {
    let fp = Fp::new(cfg.prime)?;
    match ring {
        "etale" => {
            let (lo, hi) = cfg.window()?;
            Ok(EtaleRing::new(fp).hilbert(cfg.stem_max, lo, hi))
        }
        "reduced" => {
            let table = ReducedRing::for_stem(fp, cfg.stem_max)?.hilbert(cfg.stem_max)?;
            if cfg.window_given() {
                let (lo, hi) = cfg.window()?;
                Ok(table.restrict(|b| b.w >= lo && b.w <= hi))
            } else {
                Ok(table)
            }
        }
        "integral" => {
            let (lo, hi) = cfg.window()?;
            Ok(IntegralRing::for_stem(fp, cfg.stem_max)?.hilbert(cfg.stem_max, lo, hi)?)
        }
        other => Err(Failure::Usage(format!(
            "unknown ring '{other}' (expected one of: etale, reduced, integral)"
        ))),
    }
}

fn cmd_chart(ring: &str, cfg: &RunConfig) -> Result<(), Failure> {
    let format = cfg.format_or("svg", &["svg", "tsv"])?;
    let chart = chart::build(ring, cfg)?;
    let text = match format.as_str() {
        "tsv" => emit::hilbert_tsv(&chart.table),
        _ => {
            let window = if cfg.window_given() || ring != "reduced" {
                let (lo, hi) = cfg.window()?;
                format!(", weights {lo}..{hi}")
            } else {
                String::new()
            };
            let title = format!(
                "{ring} ring, p = {}, stems <= {}{window}",
                cfg.prime, cfg.stem_max
            );
            chart.render_svg(&title)
        }
    };
    write_output(cfg.out.as_deref(), &text)
}
