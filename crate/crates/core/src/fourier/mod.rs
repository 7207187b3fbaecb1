//! Fourier-side building blocks.
//!
//! Convention: `f^(xi) = \int f(x) e^{-2 pi i x.xi} dx`, inverse
//! `f(x) = \int f^(xi) e^{2 pi i x.xi} dxi`. With this normalisation
//! Plancherel holds without constants and `||f||_inf <= ||f^||_1`.

mod bessel;
mod profile;
mod quadrature;
mod transform;

pub use bessel::{j0, j1};
pub use profile::RadialProfile;
pub use quadrature::{disc_quadrature, disc_quadrature_folded, GaussLegendre, PlanarGrid, Region};
pub use transform::{inverse_radial_transform, spatial_bump, tail_mass, SpatialBump, TailMass};
