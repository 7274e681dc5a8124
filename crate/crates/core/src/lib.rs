//! Numerical toolkit for inhomogeneous Strichartz estimates.
//!
//! The crate covers exponent arithmetic, spectral propagators on periodic
//! grids, Lorentz/Sobolev/Besov norms, the dyadic summation argument for
//! weak-type bounds, and two explicit counterexample constructions.

// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterexamples;
pub mod dyadic_summation;
pub mod error;
pub mod exponent_geometry;
pub mod extremizer_search;
pub mod grid_fields;
pub mod norms;
pub mod profiles;
pub mod propagators;
pub mod quadrature;
pub mod regression;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
