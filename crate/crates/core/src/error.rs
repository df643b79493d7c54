use std::path::PathBuf;

use thiserror::Error;

use crate::fit::IterationRecord;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid probe grid: {0}")]
    InvalidGrid(String),

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("network has no nonzero drive entry")]
    NoDrive,

    #[error("response matrix is singular at probe {probe} MHz")]
    SingularResponse { probe: f64 },

    #[error("eigenvalue solver failed: {0}")]
    Eigen(String),

    #[error(
        "ambiguous lossy component: driving `{first}` ({first_width:.6} MHz) and `{second}` \
         ({second_width:.6} MHz) give indistinguishable mean antiresonance widths"
    )]
    AmbiguousLossyComponent {
        first: String,
        second: String,
        first_width: f64,
        second_width: f64,
    },

    #[error("fit did not converge within {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        trace: Vec<IterationRecord>,
    },

    #[error("rank-deficient normal equations")]
    RankDeficient,

    #[error("invalid fit input: {0}")]
    InvalidFitInput(String),

    #[error("histogram is not identifiable: {0}")]
    NonIdentifiable(String),

    #[error("empty phase stream")]
    EmptyHistogram,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid oracle parameters: {0}")]
    InvalidOracleParams(String),

    #[error(
        "photon cutoff did not converge: <n> = {photons_low:e} at cutoff {cutoff_low}, \
         {photons_high:e} at cutoff {cutoff_high}"
    )]
    CutoffNonConvergence {
        cutoff_low: usize,
        cutoff_high: usize,
        photons_low: f64,
        photons_high: f64,
    },

    #[error("g2(0) undefined: mean photon number is zero")]
    UndefinedG2,

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io(_) | Error::File { .. } => 3,
            Error::Json(_) | Error::Parse { .. } | Error::Config(_) => 4,
            Error::InvalidNetwork(_) | Error::InvalidGrid(_) | Error::UnknownMode(_) | Error::NoDrive => 5,
            Error::AmbiguousLossyComponent { .. } => 6,
            Error::NonConvergence { .. }
            | Error::RankDeficient
            | Error::InvalidFitInput(_)
            | Error::NonIdentifiable(_)
            | Error::EmptyHistogram => 7,
            Error::InvalidOracleParams(_) | Error::CutoffNonConvergence { .. } | Error::UndefinedG2 => 8,
            Error::SingularResponse { .. } | Error::Eigen(_) => 9,
            Error::CheckFailed(_) => 10,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
