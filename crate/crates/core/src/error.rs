//! Crate-wide error type and result alias.

use thiserror::Error;

/// Errors produced by the capability pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Probability vector with no mass at all.
    #[error("degenerate distribution: all entries are zero")]
    DegenerateDistribution,

    /// g²(0) requested for a state with zero mean photon number.
    #[error("vacuum-only state: mean photon number is zero")]
    VacuumOnlyState,

    #[error("empty probability vector")]
    EmptyDistribution,

    #[error("negative probability {value:e} at photon number {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("distribution is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("attenuation eta = {0} outside [0, 1]")]
    EtaOutOfRange(f64),

    #[error("truncation removed all mass (p0 + p1 = 0)")]
    EmptyTruncation,

    #[error("got {got} occupation numbers for {expected} modes")]
    ModeCountMismatch { got: usize, expected: usize },

    #[error("term budget exceeded: {terms:e} tuples > {budget:e}; use the convolution backend")]
    TermBudgetExceeded { terms: f64, budget: f64 },

    #[error("no input distributions")]
    NoInputs,

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("dataset has {runs} runs, fewer than the {groups} requested groups")]
    TooFewRuns { runs: usize, groups: usize },

    #[error("dataset contains no runs")]
    EmptyDataset,

    #[error("quadrature dataset has {got} samples, reconstruction needs at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("detection efficiency {0} outside (0, 1]")]
    EfficiencyOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("log-likelihood decreased at iteration {iteration}: {before} -> {after}")]
    LikelihoodDecreased {
        iteration: usize,
        before: f64,
        after: f64,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 for validation errors, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RootFinding(_) | Error::LikelihoodDecreased { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
