//! Error type shared by every module of the laboratory.

use crate::sphere::ChartId;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LabError>;

/// Everything that can go wrong in the laboratory.
///
/// Variants split into three groups that the CLI maps to exit codes:
/// configuration/usage problems (exit 2), data-precondition and analysis
/// failures (exit 3), and I/O plumbing (exit 2).
#[derive(Debug, Error)]
pub enum LabError {
    /// Stereographic projection was requested at (or too close to) the
    /// chart's own projection pole.
    #[error("stereographic projection onto the {chart} chart is undefined at its pole")]
    PoleSingularity { chart: ChartId },

    /// The two charts of a field disagree on the overlap annulus beyond the
    /// field's consistency tolerance.
    #[error(
        "charts disagree on the overlap annulus: max deviation {found:.3e} exceeds \
         tolerance {tol:.3e} (estimated grid size to close the gap: n >= {needed_n})"
    )]
    InconsistentAtlas {
        found: f64,
        tol: f64,
        needed_n: usize,
    },

    /// The grid cannot resolve the requested construction.
    #[error(
        "grid n = {n} cannot resolve the requested construction \
         (needs n >= {needed_n}; largest usable neck parameter is k = {max_usable_k})"
    )]
    ResolutionTooCoarse {
        n: usize,
        needed_n: usize,
        max_usable_k: u32,
    },

    /// A Möbius dilation or blow-up rescaling was asked for with a
    /// non-positive (or non-finite) scale.
    #[error("dilation scale must be positive and finite, got {scale}")]
    NonPositiveScale { scale: f64 },

    /// An iterative solver exhausted its sweep budget without reaching the
    /// residual target.
    #[error("solver did not reach residual {target:.1e} in {iters} sweeps (residual {residual:.3e})")]
    SolverDivergence {
        iters: usize,
        residual: f64,
        target: f64,
    },

    /// An operation that normalizes by a source norm received a numerically
    /// zero source.
    #[error("source field has L1 norm {norm:.3e} <= 1e-12; the normalized quantity is undefined")]
    DegenerateSource { norm: f64 },

    /// An exponent parameter lies outside the range the underlying estimate
    /// is stated for.
    #[error("exponent {value} outside the admissible range {range}")]
    InvalidExponent { value: f64, range: &'static str },

    /// A machine-checked hypothesis of a regularity experiment failed.
    #[error("family member {member}: hypothesis violated: {hypothesis}")]
    HypothesisViolated { member: usize, hypothesis: String },

    /// A family-driven experiment was handed no members.
    #[error("experiment requires a non-empty family")]
    EmptyFamily,

    /// The metric has too little total mass for the requested threshold.
    #[error("total mass {area:.6} is below the required {needed:.6}")]
    MassDeficient { area: f64, needed: f64 },

    /// A bracketing or root-finding loop failed to converge.
    #[error("{what} did not converge within {iters} iterations")]
    NoConvergence { what: &'static str, iters: usize },

    /// Invalid configuration or command-line input.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Exit code for the CLI: 2 for usage/config errors, 3 for data
    /// precondition and analysis failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) | LabError::Io(_) | LabError::Json(_) => 2,
            _ => 3,
        }
    }
}
