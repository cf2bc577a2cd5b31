//! Exact construction, classification and reduction of homogeneous star products on
//! duals of polynomial Lie algebroid presentations.
//!
//! All arithmetic is over the Gaussian rationals; the formal parameter `h` is truncated
//! at an explicit order everywhere.

#![allow(clippy::needless_range_loop)]

pub mod algebroid;
pub mod classes;
pub mod cochain;
pub mod error;
pub mod formats;
pub mod gutt;
pub mod hbar;
pub mod hkr;
pub mod linalg;
pub mod poly;
pub mod reduction;
pub mod scalar;
pub mod star;
pub mod text;

pub use error::{Error, Result};
pub use hbar::HbarPoly;
pub use poly::{EulerDegree, Monomial, MultiIndex, Poly, VarSpec};
pub use scalar::Scalar;
