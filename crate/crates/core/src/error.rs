//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A multistep pusher was asked to step before its history was full.
    #[error("history not ready: have {have} entries, need {need}")]
    HistoryNotReady { have: usize, need: usize },

    /// The exponential pusher was configured without coefficients.
    #[error("exponential predictor-corrector requires coefficients")]
    MissingCoefficients,

    /// Coefficient construction left a residual too large to be usable.
    #[error("coefficient construction ill-conditioned: residual {residual:.3e} exceeds {limit:.1e} (k={k}, rho={rho}, rank={rank})")]
    IllConditioned {
        residual: f64,
        limit: f64,
        k: usize,
        rho: f64,
        rank: usize,
    },

    /// Field evaluation hit a singular point of the scenario.
    #[error("field singularity: {0}")]
    FieldSingularity(String),

    /// A singularity or failure at a specific step of a run.
    #[error("step {step} (t = {t:.6e}): {source}")]
    AtStep {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    /// The fine-step reference integrator failed its halving self-check.
    #[error("reference integrator not converged: halving disagreement {0:.3e}")]
    ReferenceNotConverged(f64),

    /// Trajectory/oracle sample counts differ.
    #[error("sample length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A coefficient document failed to parse or is structurally wrong.
    #[error("malformed coefficient document: {0}")]
    MalformedDocument(String),

    /// A loaded coefficient document disagrees with its recorded residual.
    #[error(
        "coefficient verification mismatch: recorded {recorded:.6e}, recomputed {recomputed:.6e}"
    )]
    VerificationMismatch { recorded: f64, recomputed: f64 },

    /// Invalid experiment configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wrap an error with the step index and time at which it occurred.
    pub fn at_step(self, step: usize, t: f64) -> Error {
        Error::AtStep {
            step,
            t,
            source: Box::new(self),
        }
    }

    /// True for failures of numerical procedures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::IllConditioned { .. }
            | Error::ReferenceNotConverged(_)
            | Error::FieldSingularity(_)
            | Error::VerificationMismatch { .. } => true,
            Error::AtStep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
