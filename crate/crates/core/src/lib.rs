//! Certified finite-dimensional `ℓ^p` approximations in `L^p` of a finite measure
//! space, the uniform convexity modulus derived from them, and a small syntactic
//! toolkit for finite-type sentences.

pub mod approx;
pub mod bm;
pub mod convexity;
pub mod doc;
mod error;
pub mod logic;
pub mod measure;
pub mod scalar;
pub mod tol;

pub use error::{Error, Result};
pub use measure::{MeasureSpace, SimpleFunction};
pub use scalar::{Exponent, Scalar};
