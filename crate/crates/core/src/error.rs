// Copyright 2026 The unravel Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::generators::PureState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported Hilbert-space dimension {0} (supported: 2..=16)")]
    UnsupportedDimension(usize),

    #[error("{what} is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("{what} is not symmetric (max deviation {deviation:.3e})")]
    NotSymmetric { what: &'static str, deviation: f64 },

    #[error("{0} has non-finite entries")]
    NonFinite(&'static str),

    #[error("state vector has zero or non-finite norm")]
    DegenerateState,

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("states are not orthogonal (|<psi|psi_perp>| = {0:.3e})")]
    NotOrthogonal(f64),

    #[error("generator is not trace preserving (max |Tr L(X)| = {0:.3e})")]
    NotTracePreserving(f64),

    #[error("generator is not Hermiticity preserving (max deviation {0:.3e})")]
    NotHermiticityPreserving(f64),

    #[error("s matrix has spectral norm {0} > 1")]
    SNormExceeded(f64),

    #[error(
        "noise covariance is not positive semidefinite (least eigenvalue {min_eigenvalue:.3e})"
    )]
    CovarianceNotPsd { min_eigenvalue: f64 },

    #[error(
        "dynamics is not positive at the current state: W has eigenvalue {min_eigenvalue:.3e}"
    )]
    NotPositiveAtState {
        min_eigenvalue: f64,
        witness: PureState,
    },

    #[error("unraveling needs Lindblad operators but the generator was not built from them")]
    MissingLindbladData,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step failed at t = {time}: {source}")]
    StepFailed {
        time: f64,
        state: PureState,
        #[source]
        source: Box<Error>,
    },

    #[error("{failed} of {total} trajectories failed; first failure: {first}")]
    EnsembleFailed {
        failed: usize,
        total: usize,
        first: Box<Error>,
    },

    #[error("trajectory records do not share a common time grid")]
    GridMismatch,

    #[error("master-equation integration became unstable at t = {time} (drift {drift:.3e})")]
    Unstable { time: f64, drift: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error reports a property of the physics (a positivity
    /// violation) rather than bad input.
    pub fn is_scientific(&self) -> bool {
        match self {
            Error::NotPositiveAtState { .. } | Error::CovarianceNotPsd { .. } => true,
            Error::StepFailed { source, .. } => source.is_scientific(),
            Error::EnsembleFailed { first, .. } => first.is_scientific(),
            _ => false,
        }
    }
}
