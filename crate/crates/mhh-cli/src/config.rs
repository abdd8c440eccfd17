//! Flag, config-file, and default resolution for every subcommand.
//!
//! Precedence is: explicit flag, then config-file field, then built-in
//! default. The config file is JSON with the same keys as the long flags
//! (kebab-case); unknown keys are rejected so typos surface as usage errors
//! instead of silently falling back to defaults.

use std::path::PathBuf;

use serde::Deserialize;

use mhh_core::steenrod::Variant;

use crate::Failure;

pub const DEFAULT_PRIME: u64 = 2;
pub const DEFAULT_VARIANT: &str = "mod-tau";
pub const DEFAULT_STEM_MAX: i64 = 12;
pub const DEFAULT_WEIGHT_MIN: i64 = -6;
pub const DEFAULT_WEIGHT_MAX: i64 = 12;
pub const DEFAULT_F_SUPPORT_MAX: usize = 3;
pub const DEFAULT_F_VALUE_MAX: u32 = 3;
pub const DEFAULT_SEED: u64 = 0x6d6868;

/// Flags shared by all subcommands. Everything is optional here; the
/// resolved values live in [`RunConfig`].
#[derive(clap::Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Coefficient prime p.
    #[arg(long)]
    pub prime: Option<u64>,

    /// Coefficient variant: integral, mod-tau, or etale.
    #[arg(long)]
    pub variant: Option<String>,

    /// Largest stem (filtration + degree) to compute.
    #[arg(long)]
    pub stem_max: Option<i64>,

    /// Lower end of the motivic weight window.
    #[arg(long)]
    pub weight_min: Option<i64>,

    /// Upper end of the motivic weight window.
    #[arg(long)]
    pub weight_max: Option<i64>,

    /// Keep only rows of bar filtration at most this.
    #[arg(long)]
    pub filtration_max: Option<i64>,

    /// Largest index allowed in exponent-function supports (verify).
    #[arg(long)]
    pub f_support_max: Option<usize>,

    /// Largest value an exponent function may take (verify).
    #[arg(long)]
    pub f_value_max: Option<u32>,

    /// Output format; tables take tsv or json, charts svg or tsv.
    #[arg(long)]
    pub format: Option<String>,

    /// Write output to this path atomically instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Seed for the randomized property suites (verify).
    #[arg(long)]
    pub seed: Option<u64>,

    /// JSON config file with the same keys; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// The config file mirrors the flags, all optional.
#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    prime: Option<u64>,
    variant: Option<String>,
    stem_max: Option<i64>,
    weight_min: Option<i64>,
    weight_max: Option<i64>,
    filtration_max: Option<i64>,
    f_support_max: Option<usize>,
    f_value_max: Option<u32>,
    format: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

/// Fully resolved run configuration. The weight window stays optional so
/// each subcommand can decide whether an unbounded computation is legal
/// (mod-τ tables are finite without one) or needs the default window.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub prime: u64,
    pub variant: String,
    pub stem_max: i64,
    pub weight_min: Option<i64>,
    pub weight_max: Option<i64>,
    pub filtration_max: Option<i64>,
    pub f_support_max: usize,
    pub f_value_max: u32,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig, Failure> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Failure::Usage(format!("config {}: {e}", path.display()))
                })?;
                serde_json::from_str::<FileConfig>(&text).map_err(|e| {
                    Failure::Usage(format!("config {}: {e}", path.display()))
                })?
            }
            None => FileConfig::default(),
        };
        Ok(RunConfig {
            prime: args.prime.or(file.prime).unwrap_or(DEFAULT_PRIME),
            variant: args
                .variant
                .clone()
                .or(file.variant)
                .unwrap_or_else(|| DEFAULT_VARIANT.to_string()),
            stem_max: args.stem_max.or(file.stem_max).unwrap_or(DEFAULT_STEM_MAX),
            weight_min: args.weight_min.or(file.weight_min),
            weight_max: args.weight_max.or(file.weight_max),
            filtration_max: args.filtration_max.or(file.filtration_max),
            f_support_max: args
                .f_support_max
                .or(file.f_support_max)
                .unwrap_or(DEFAULT_F_SUPPORT_MAX),
            f_value_max: args
                .f_value_max
                .or(file.f_value_max)
                .unwrap_or(DEFAULT_F_VALUE_MAX),
            format: args.format.clone().or(file.format),
            out: args.out.clone().or(file.out),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        })
    }

    /// Whether the user pinned either end of the weight window.
    pub fn window_given(&self) -> bool {
        self.weight_min.is_some() || self.weight_max.is_some()
    }

    /// The weight window with defaults filled in, rejected when empty.
    pub fn window(&self) -> Result<(i64, i64), Failure> {
        let lo = self.weight_min.unwrap_or(DEFAULT_WEIGHT_MIN);
        let hi = self.weight_max.unwrap_or(DEFAULT_WEIGHT_MAX);
        if lo > hi {
            return Err(Failure::Usage(format!("empty weight window [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }

    /// The output format, defaulted per command and validated.
    pub fn format_or(
        &self,
        default: &'static str,
        allowed: &[&str],
    ) -> Result<String, Failure> {
        let f = self.format.clone().unwrap_or_else(|| default.to_string());
        if allowed.contains(&f.as_str()) {
            Ok(f)
        } else {
            Err(Failure::Usage(format!(
                "unsupported format '{f}' (expected one of: {})",
                allowed.join(", ")
            )))
        }
    }
}

pub fn parse_variant(s: &str) -> Result<Variant, Failure> {
    match s {
        "integral" => Ok(Variant::Integral),
        "mod-tau" => Ok(Variant::ModTau),
        "etale" => Ok(Variant::Etale),
        other => Err(Failure::Usage(format!(
            "unknown variant '{other}' (expected one of: integral, mod-tau, etale)"
        ))),
    }
}
