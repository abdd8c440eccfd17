//! Trigraded computer algebra for motivic Hochschild homology of prime fields.
//!
//! The crate computes the homology of reduced bar complexes over the dual
//! motivic Steenrod algebra (with the class ρ = 0 throughout, i.e. over an
//! algebraically closed base), runs the τ-Bockstein / d^{p−1} spectral
//! sequence machinery on the resulting pages, and cross-checks everything
//! against closed-form descriptions of the target rings. Three variants are
//! supported end to end: integral (F_p[τ] coefficients), mod τ^{p−1}, and
//! étale (τ inverted).

pub mod algebra;
pub mod bar;
pub mod binom;
pub mod check;
pub mod cube;
pub mod fp;
pub mod grading;
pub mod linalg;
pub mod rings;
pub mod spectral;
pub mod steenrod;
pub mod table;

/// Errors shared across the crate. CLI consumers map these to exit code 2
/// (usage/config errors) as opposed to verification failures (exit 1).
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus must be prime")]
    NotPrime(u64),
    #[error("matrix entry ({0}, {1}) out of range")]
    IndexOutOfRange(usize, usize),
    #[error("duplicate matrix entry at ({0}, {1})")]
    DuplicateEntry(usize, usize),
    #[error("explicit zero entry at ({0}, {1})")]
    ZeroEntry(usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("boundary vector outside cycle span (column {0})")]
    NotInSpan(usize),
    #[error("unbounded enumeration region: {0}")]
    InfiniteRegion(String),
    #[error("invalid generator data: {0}")]
    BadGenerator(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
