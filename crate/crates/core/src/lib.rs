//! Complex-momentum spectra and Gaussian-regularized inner products for
//! one-dimensional cut-off potentials.

pub mod error;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod regint;
pub mod products;
pub mod spectrum;

pub use error::{Error, Result};
