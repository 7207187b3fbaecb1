//! Numerical laboratory for Hankel operators on the Paley-Wiener space of the
//! unit disc.
//!
//! The symbols studied here are sums of `n` translated copies of a smooth
//! radial bump placed just inside the circle of radius 2. Their Hankel
//! operators split into orthogonal pieces, which keeps the operator norm at
//! the scale of a single bump, while a duality argument forces every bounded
//! extension of the symbol to grow like `sqrt(n)`. The modules below compute
//! each ingredient of that comparison numerically.

// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod hankel;
pub mod par;
pub mod point;
pub mod symbols;

pub use error::{Error, Result};
pub use point::Point;
