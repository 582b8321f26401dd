//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by samplers, observables, oracles, and the trajectory engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("diverged point in snapshot")]
    DivergedPoint,

    #[error("undefined probabilities (empty field)")]
    UndefinedProbabilities,

    #[error("gamma shape must be positive, got {0}")]
    InvalidGammaShape(f64),

    #[error("Fock sampling unsupported in Wigner")]
    FockUnsupportedInWigner,

    #[error("nbar must be non-negative, got {0}")]
    NegativeNbar(f64),

    #[error("time grid must be non-empty, start at a non-negative time, and ascend")]
    BadTimeGrid,

    #[error("cutoff too small: truncated mass {deficit:e} >= 1e-6")]
    CutoffTooSmall { deficit: f64 },

    #[error("invalid mean-field parameters: require 0 <= N_b0 <= N_T, got N_b0={n_b0}, N_T={n_total}")]
    InvalidMeanFieldParams { n_total: f64, n_b0: f64 },

    #[error("accumulators have mismatched sample grids")]
    MismatchedGrids,

    #[error(
        "divergent trajectory fraction {fraction:.3e} exceeds budget {budget:.3e} (first divergence at t = {onset})"
    )]
    DivergenceBudgetExceeded {
        fraction: f64,
        budget: f64,
        onset: f64,
    },

    #[error("zero surviving trajectories")]
    NoSurvivors,

    #[error("plot curves have mismatched time grids")]
    MismatchedPlotGrids,

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
