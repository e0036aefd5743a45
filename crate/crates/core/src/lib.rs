//! Exact Fourier coefficients of degree-2 quaternionic modular forms over the
//! Hurwitz order, and bounded-box verifiers for their congruences.
//!
//! The ring machinery ([`FourierExpansion`], [`QSeries`]) is generic over a
//! [`Scalar`]; the aliases below fix the exact rational instantiation used by
//! the verifiers, plus a floating-point one for quick approximate work.

pub mod congr;
pub mod error;
pub mod exactnum;
pub mod fexp;
pub mod forms;
pub mod quatlat;
pub mod scalar;
pub mod series;
pub mod tmat;

pub use error::{Error, Result};
pub use fexp::{Congruence, FourierExpansion};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use quatlat::QuatCoord;
pub use scalar::Scalar;
pub use series::QSeries;
pub use tmat::{IndexBox, TMatrix};

/// Exact expansion over the rationals.
pub type Expansion = FourierExpansion<BigRational>;
/// Approximate expansion in double precision.
pub type ExpansionF64 = FourierExpansion<f64>;
/// Exact elliptic q-series.
pub type Series = QSeries<BigRational>;
/// Approximate elliptic q-series.
pub type SeriesF64 = QSeries<f64>;
