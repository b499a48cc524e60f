use num_complex::Complex64;
use thiserror::Error;

use crate::bc::Domain;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("boundary condition `{bc}` is not defined on the {domain}")]
    IncompatibleDomain { bc: String, domain: Domain },

    #[error("matrix is not unitary (max |U U^† - I| = {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("expected a {expected}x{expected} boundary matrix, got {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },

    #[error("spectral parameter z = {z} lies within {distance:.3e} of the spectrum")]
    PoleProximity { z: Complex64, distance: f64 },

    #[error("Krein matrix is singular at z = {z} (condition number {condition:.3e})")]
    SingularKreinMatrix { z: Complex64, condition: f64 },

    #[error("no closed-form resolvent for `{0}`; use the Krein or spectral route")]
    NoClosedForm(String),

    #[error("no image-sum kernel for `{0}`")]
    NoImageForm(String),

    #[error("root finding failed: {0}")]
    RootFindingFailure(String),

    #[error("spectrum too short: e^(-lambda_max T) = {tail:.3e} exceeds tolerance {tol:.3e}")]
    InsufficientSpectrum { tail: f64, tol: f64 },

    #[error("contour quadrature did not converge (error estimate {estimate:.3e})")]
    ContourFailure { estimate: f64 },

    #[error("Laplace integral does not converge for z = {z}")]
    DivergentIntegral { z: Complex64 },

    #[error("endpoint {point} lies on the boundary")]
    EndpointOnBoundary { point: f64 },

    #[error("winding strata omit relative weight {omitted:.3e} (> 1e-12)")]
    WindingTruncation { omitted: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse `{token}`: {reason} (example: `{example}`)")]
    Parse {
        token: String,
        reason: String,
        example: String,
    },
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::PoleProximity { .. }
                | Error::SingularKreinMatrix { .. }
                | Error::RootFindingFailure(_)
                | Error::InsufficientSpectrum { .. }
                | Error::ContourFailure { .. }
                | Error::DivergentIntegral { .. }
                | Error::WindingTruncation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
