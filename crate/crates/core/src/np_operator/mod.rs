//! The Neumann-Poincaré operator
//! `K*[ψ](x) = ∫ ∂_{n_x} E(x, y) ψ(y) dS_y` with `E(x, y) = -1/(4π|x - y|)`.
//!
//! On the unit sphere `K*` is diagonal in spherical harmonics with eigenvalue
//! `1/(2(2k+1))` on degree `k`. For a perturbed sphere the operator is
//! discretized by Galerkin projection onto `{Y_{k,l} : k <= L}` (see
//! [`assembly`]), diagonalized ([`eigen`]), and the `2k+1` branches leaving
//! each degenerate sphere eigenvalue are picked out by eigenvector overlap
//! ([`multiplet`]).

pub mod assembly;
pub mod eigen;
pub mod multiplet;

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

pub use assembly::{assemble, AssemblyPlan, Assembler, GalerkinConfig, NpSystem, SerialAssembler};
pub use eigen::{eigensolve, EigenDecomposition, SYMMETRIZATION_WARN_IMAG};
pub use multiplet::{fd_multiplet_slopes, select_multiplet, track_multiplet, FdSlopes, Multiplet};

/// `1/(2(2k+1))`, the degree-`k` eigenvalue of `K*` on the unit sphere.
pub fn sphere_np_eigenvalue(k: usize) -> f64 {
    1.0 / (2 * (2 * k + 1)) as f64
}

/// Boundary eigenvalue `-1/(2k+1)` of the single layer potential on the unit
/// sphere, `S[Y_{k,l}] = -Y_{k,l}/(2k+1)` on `r = 1`.
pub fn sphere_single_layer_eigenvalue(k: usize) -> f64 {
    -1.0 / (2 * k + 1) as f64
}

/// `∂_{n_x} E(x, y) = <x - y, n_x> / (4π |x - y|³)`.
pub fn np_kernel(x: Vec3, y: Vec3, n_x: Vec3) -> Result<f64> {
    let d = x - y;
    let r2 = d.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular);
    }
    Ok(kernel_unchecked(d, r2, n_x))
}

#[inline]
pub(crate) fn kernel_unchecked(d: Vec3, r2: f64, n_x: Vec3) -> f64 {
    d.dot(n_x) / (4.0 * PI * r2 * libm::sqrt(r2))
}
