use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid search region: {0}")]
    InvalidRegion(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("local momentum vanishes in segment {segment} at z = {z}")]
    DegenerateLocalMomentum { z: Complex64, segment: usize },

    #[error("momentum z = 0 is not admissible")]
    ZeroMomentum,

    #[error("zero of the denominator too close to the contour (min |D| = {min_modulus:e}, median {median:e})")]
    ContourTooClose { min_modulus: f64, median: f64 },

    #[error("rectangle subdivision exceeded depth {depth} near {near}")]
    MaxDepthExceeded { depth: usize, near: Complex64 },

    #[error("Newton iteration did not converge: last iterate {last}, residual {residual:e}")]
    NonConvergence { last: Complex64, residual: f64 },

    #[error("spectral point at {0} is not a resonance")]
    NotAResonance(Complex64),

    #[error("state is not a bound state")]
    NotBound,

    #[error("states are defined over different potentials")]
    SamePotentialRequired,

    #[error("degenerate energy pair: conj(z_a)^2 = z_b^2")]
    DegenerateEnergyPair,

    #[error("quadrature failed: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureFailure { achieved: f64, requested: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
