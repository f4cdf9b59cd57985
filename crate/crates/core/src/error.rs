use std::path::PathBuf;

use thiserror::Error;

/// Which root-finding route produced (or failed to produce) a recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryMethod {
    /// Newton on the ideal-gas pressure function Φ(p).
    PhiNewton,
    /// Bracketed Newton on the energy-definition residual in p.
    PressureResidual,
    /// Newton on S(Π) with Π = E + p.
    PiNewton,
    /// Root of the velocity quartic Ξ(|v|); only used as an oracle.
    XiQuartic,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible state: D = {d:e}, q = {q:e}")]
    Inadmissible { d: f64, q: f64 },

    #[error("{method:?} recovery did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: RecoveryMethod,
        iterations: usize,
        residual: f64,
    },

    #[error("unsupported polynomial degree {0}; supported degrees are 1..=4")]
    UnsupportedDegree(usize),

    #[error("flux evaluation failed at element {element}, node {node}, stage {stage}: {source}")]
    FluxArgument {
        element: usize,
        node: usize,
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("admissibility violated at step {step}, element {element}: {reason}")]
    Admissibility {
        step: usize,
        element: usize,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors that mean the solution left the admissible set.
    pub fn is_admissibility(&self) -> bool {
        match self {
            Error::Inadmissible { .. } | Error::Admissibility { .. } => true,
            Error::FluxArgument { source, .. } => source.is_admissibility(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
