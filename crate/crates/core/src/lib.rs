//! Monte Carlo census of separability and classicality for two-mode
//! Gaussian states.
//!
//! Random 4×4 covariance matrices are pushed through a chain of filters
//! (positive definiteness, local uncertainty, the EPR-variance criterion)
//! and weighted by one of two prior measures:
//!
//! - the classical Jeffreys prior, `det(M)^(-5/2)`;
//! - monotone-metric volume elements (Bures, Kubo-Mori, maximal) obtained by
//!   discretizing the position-space density matrix on small grids.
//!
//! Conventions: quadratures are ordered `(x₁, p₁, x₂, p₂)` and scaled so that
//! `[x, p] = 2i`; the vacuum covariance matrix is the identity.
//!
//! ```
//! use cvcensus::states::CovarianceMatrix;
//! use cvcensus::criteria::is_classical;
//! use cvcensus::Tolerances;
//!
//! let thermal = CovarianceMatrix::identity().scaled(2.0);
//! assert!(is_classical(&thermal, &Tolerances::default()));
//! ```

#![forbid(unsafe_code)]

pub mod criteria;
mod error;
pub mod fidelity;
mod linalg;
pub mod measures;
pub mod montecarlo;
pub mod quadrature;
pub mod states;
mod tolerances;

pub use error::{CensusError, Error, MeasureError, StateError};
pub use tolerances::Tolerances;
