use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by evaluators, transforms and identity checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("base q = {0} must satisfy 0 < |q| < 1")]
    InvalidModulus(Complex64),

    #[error("invalid truncation policy: {0}")]
    InvalidTruncation(String),

    #[error("argument must be nonzero")]
    ZeroArgument,

    #[error("truncation limit of {n_max} terms reached before the tail criterion was met")]
    TruncationExceeded { n_max: usize },

    #[error("{point} lies within relative distance {distance:.3e} of the spiral {spiral} (index {index})")]
    SpiralProximity {
        point: Complex64,
        spiral: String,
        index: i64,
        distance: f64,
    },

    #[error("{point} is within tolerance of the pole {pole}")]
    PoleHit { point: Complex64, pole: Complex64 },

    #[error("series with r - s > 1 diverges unless an upper parameter terminates it")]
    DivergentSeries,

    #[error("|x| = {modulus} is outside the unit radius of convergence")]
    OutsideRadius { modulus: f64 },

    #[error("lower parameter #{index} hits q^-{power}; the series is undefined")]
    BadLowerParameter { index: usize, power: i64 },

    #[error("operands use different bases")]
    BaseMismatch,

    #[error("contour quadrature did not settle within {nodes} nodes")]
    NoConvergence { nodes: usize },

    #[error("integrand failed on the contour at tau = {tau}")]
    PoleOnContour { tau: Complex64 },

    #[error("intermediate value left the f64 range at {point}")]
    Overflow { point: Complex64 },

    #[error("theta vanishes at {arg} (zero spiral -q^Z)")]
    ThetaZero { arg: Complex64 },

    #[error("no grid point survived the exclusion filter")]
    EmptyGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl QError {
    /// True for errors that mean "the point is outside the domain of the formula"
    /// as opposed to numerical failure or bad usage.
    pub fn is_domain_exclusion(&self) -> bool {
        matches!(
            self,
            QError::ZeroArgument
                | QError::SpiralProximity { .. }
                | QError::PoleHit { .. }
                | QError::DivergentSeries
                | QError::OutsideRadius { .. }
                | QError::BadLowerParameter { .. }
                | QError::ThetaZero { .. }
                | QError::EmptyGrid
        )
    }
}

pub type Result<T> = std::result::Result<T, QError>;
