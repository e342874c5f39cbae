use thiserror::Error;

/// Failure modes surfaced by the library.
///
/// Exit-code policy for the binary: configuration and I/O problems map to 2,
/// numeric failures during a run map to 3.
#[derive(Error, Debug)]
pub enum Error {
    #[error("filter denominator has a zero leading coefficient")]
    ZeroLeadingDenominator,

    #[error("non-finite value produced at sample {index}")]
    NonFinite { index: usize },

    #[error("frequency response denominator vanishes at omega = {omega}")]
    DenominatorZero { omega: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("controller is not invertible: numerator leading coefficient is zero")]
    NonInvertibleController,

    #[error("time constant must be positive, got {tc}")]
    NonPositiveTimeConstant { tc: f64 },

    #[error("plant output diverged (|y| = {magnitude:.3e})")]
    Divergence { magnitude: f64 },

    #[error("constraint set is infeasible: row {row} admits no solution")]
    InfeasibleConstraints { row: usize },

    #[error("response measurement did not converge: signal power {power:.3e} below threshold")]
    NoConvergence { power: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for config/I-O problems, 3 for
    /// numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Parse(_) => 2,
            _ => 3,
        }
    }
}
