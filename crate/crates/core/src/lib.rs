//! Neumann-Poincaré spectra on the unit sphere and on radially perturbed
//! spheres `{(1 + h a(ω)) ω}`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, the command line and the threaded
//! assembly driver live in the `npspec` companion crate.
//!
//! Module map:
//!
//! * [`harmonics`]: complex solid harmonics from the monomial triple sum,
//!   their gradients by degree-lowering recurrences, and the real basis used
//!   for perturbation fields.
//! * [`quadrature`]: Gauss-Legendre x trapezoid product rules on S², plus the
//!   rotated-pole rule for the weakly singular kernel.
//! * [`geometry`]: the radial graph surface, its normals and area element.
//! * [`np_operator`]: the kernel, Galerkin assembly, eigen-decomposition and
//!   multiplet tracking in `h`.
//! * [`variation`]: first-order multiplet slopes and the plasmonic map.
//! * [`spectral_sums`]: spectral zeta sums and the `k = 1` half-sum.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod geometry;
pub mod harmonics;
pub mod np_operator;
pub mod quadrature;
pub mod spectral_sums;
pub mod variation;

mod vec3;

pub use error::{Error, Result};
pub use geometry::{ShapeSpec, SurfaceFrame};
pub use harmonics::{HarmonicIndex, SpherePoint};
pub use np_operator::{GalerkinConfig, Multiplet, NpSystem};
pub use quadrature::QuadratureGrid;
pub use variation::VariationMatrix;
pub use vec3::{Rotation, Vec3};

pub use num_complex::Complex64;
