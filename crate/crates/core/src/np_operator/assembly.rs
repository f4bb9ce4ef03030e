//! Galerkin matrix of `K*` on `∂Ω(h)`.
//!
//! Densities on the surface are pulled back to S² by radial projection and
//! expanded in `{Y_j : deg j <= L}`. With `W = dS/dσ` the discrete operator
//! is `A = G⁻¹ B`, where
//!
//! ```text
//! G_ij = ∫ conj(Y_i) Y_j W dσ
//! B_ij = ∫ conj(Y_i(ω_x)) W(ω_x) [∫ K(x, y) Y_j(ω_y) W(ω_y) dσ_y] dσ_x
//! ```
//!
//! The inner integral is taken on the polar rule rotated to `ω_x`; the outer
//! one on the ordinary product rule. Each outer node contributes one row
//! vector `v_i[j] = ∫ K(x_i, y) Y_j W dσ_y`, independently of every other
//! node, which is what lets callers spread rows across threads.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ShapeSpec, SurfaceFrame};
use crate::harmonics::{basis_len, HarmonicTable};
use crate::quadrature::{build_grid, polar_rule, QuadratureGrid};
use crate::vec3::{Rotation, Vec3};

use super::kernel_unchecked;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncation degree and quadrature resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GalerkinConfig {
    /// Basis is every `Y_{k,l}` with `k <= degree`.
    pub degree: usize,
    /// Outer product rule, `(n_theta, n_phi)`.
    pub outer: (usize, usize),
    /// Inner rotated polar rule, `(n_theta, n_phi)`.
    pub inner: (usize, usize),
}

impl Default for GalerkinConfig {
    fn default() -> Self {
        Self {
            degree: 8,
            outer: (32, 64),
            inner: (48, 96),
        }
    }
}

impl GalerkinConfig {
    pub fn basis_len(&self) -> usize {
        basis_len(self.degree)
    }

    fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidArgument("Galerkin degree must be >= 1".into()));
        }
        if self.degree > crate::harmonics::MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                k: self.degree,
                max: crate::harmonics::MAX_DEGREE,
            });
        }
        if self.outer.0 == 0 || self.outer.1 == 0 || self.inner.0 == 0 || self.inner.1 == 0 {
            return Err(Error::InvalidArgument("grid resolutions must be positive".into()));
        }
        Ok(())
    }
}

/// Dense Galerkin discretization of `K*` on one surface.
#[derive(Debug, Clone)]
pub struct NpSystem {
    pub config: GalerkinConfig,
    pub shape: ShapeSpec,
    /// `(L+1)² x (L+1)²`, rows and columns in [`crate::HarmonicIndex::flat`] order.
    pub matrix: DMatrix<Complex64>,
}

/// Anything that can turn a shape into an [`NpSystem`].
///
/// [`SerialAssembler`] runs the rows in order; the `npspec` crate provides a
/// threaded one over the same [`AssemblyPlan`].
pub trait Assembler {
    fn assemble(&self, shape: &ShapeSpec, config: &GalerkinConfig) -> Result<NpSystem>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SerialAssembler;

impl Assembler for SerialAssembler {
    fn assemble(&self, shape: &ShapeSpec, config: &GalerkinConfig) -> Result<NpSystem> {
        let plan = AssemblyPlan::new(shape, config)?;
        let rows = (0..plan.outer_len())
            .map(|i| plan.row(i))
            .collect::<Result<Vec<_>>>()?;
        plan.finish(&rows)
    }
}

/// Single-threaded assembly.
pub fn assemble(shape: &ShapeSpec, config: &GalerkinConfig) -> Result<NpSystem> {
    SerialAssembler.assemble(shape, config)
}

/// Everything assembly needs that does not depend on the outer node.
#[derive(Debug, Clone)]
pub struct AssemblyPlan {
    shape: ShapeSpec,
    config: GalerkinConfig,
    table: HarmonicTable,
    outer: QuadratureGrid,
    outer_frames: Vec<SurfaceFrame>,
    // Y_j(ω_i), row-major by node
    outer_basis: Vec<Complex64>,
    inner: QuadratureGrid,
}

impl AssemblyPlan {
    pub fn new(shape: &ShapeSpec, config: &GalerkinConfig) -> Result<Self> {
        config.validate()?;
        let n = config.basis_len();
        let table = HarmonicTable::new(config.degree.max(shape.degree()))?;
        let outer = build_grid(config.outer.0, config.outer.1)?;
        let inner = polar_rule(config.inner.0, config.inner.1)?;
        let mut vals = alloc::vec![ZERO; table.len()];
        let mut outer_frames = Vec::with_capacity(outer.len());
        let mut outer_basis = Vec::with_capacity(outer.len() * n);
        for w in outer.nodes() {
            table.eval_into(w.vec(), &mut vals);
            outer_frames.push(shape.frame_from_table(w.vec(), &vals)?);
            outer_basis.extend_from_slice(&vals[..n]);
        }
        Ok(Self {
            shape: shape.clone(),
            config: *config,
            table,
            outer,
            outer_frames,
            outer_basis,
            inner,
        })
    }

    /// Number of outer quadrature nodes, i.e. of rows to compute.
    pub fn outer_len(&self) -> usize {
        self.outer.len()
    }

    /// `v_i[j] = ∫ K(x_i, y) Y_j(ω_y) W(ω_y) dσ_y` for outer node `i`.
    pub fn row(&self, i: usize) -> Result<Vec<Complex64>> {
        let n = self.config.basis_len();
        let omega_x = self.outer.nodes()[i].vec();
        let fx = self.outer_frames[i];
        let rot = Rotation::north_to(omega_x);
        let mut vals = alloc::vec![ZERO; self.table.len()];
        let mut acc = alloc::vec![ZERO; n];
        for (w, &wt) in self.inner.nodes().iter().zip(self.inner.weights()) {
            let omega_y: Vec3 = rot.apply(w.vec());
            self.table.eval_into(omega_y, &mut vals);
            let fy = self.shape.frame_from_table(omega_y, &vals)?;
            let d = fx.point - fy.point;
            let r2 = d.norm_sq();
            if r2 == 0.0 {
                return Err(Error::Singular);
            }
            let c = wt * kernel_unchecked(d, r2, fx.normal) * fy.area_weight;
            for (a, v) in acc.iter_mut().zip(&vals[..n]) {
                *a += v * c;
            }
        }
        Ok(acc)
    }

    /// Combines per-node rows (in node order) into the Galerkin matrix.
    pub fn finish(&self, rows: &[Vec<Complex64>]) -> Result<NpSystem> {
        let n = self.config.basis_len();
        if rows.len() != self.outer_len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "expected {} rows, got {}",
                self.outer_len(),
                rows.len()
            )));
        }
        let mut b = DMatrix::<Complex64>::zeros(n, n);
        let mut g = DMatrix::<Complex64>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let wx = self.outer.weights()[i] * self.outer_frames[i].area_weight;
            let y = &self.outer_basis[i * n..(i + 1) * n];
            for a in 0..n {
                let ca = y[a].conj() * wx;
                for c in 0..n {
                    b[(a, c)] += ca * row[c];
                    g[(a, c)] += ca * y[c];
                }
            }
        }
        let lu = g.lu();
        let matrix = lu
            .solve(&b)
            .ok_or_else(|| Error::Eigensolver("singular Gram matrix".into()))?;
        for c in 0..n {
            for r in 0..n {
                let v = matrix[(r, c)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFiniteEntry { row: r, col: c });
                }
            }
        }
        Ok(NpSystem {
            config: self.config,
            shape: self.shape.clone(),
            matrix,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::HarmonicIndex;
    use crate::np_operator::sphere_np_eigenvalue;

    fn small() -> GalerkinConfig {
        GalerkinConfig {
            degree: 4,
            outer: (12, 24),
            inner: (16, 24),
        }
    }

    #[test]
    fn sphere_matrix_is_diagonal() {
        let sys = assemble(&ShapeSpec::sphere(), &small()).unwrap();
        let mut worst: f64 = 0.0;
        for r in 0..sys.matrix.nrows() {
            for c in 0..sys.matrix.ncols() {
                let expect = if r == c {
                    sphere_np_eigenvalue(HarmonicIndex::from_flat(r).k())
                } else {
                    0.0
                };
                worst = worst.max((sys.matrix[(r, c)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = small();
        cfg.degree = 0;
        assert!(assemble(&ShapeSpec::sphere(), &cfg).is_err());
        let mut cfg = small();
        cfg.inner = (0, 4);
        assert!(assemble(&ShapeSpec::sphere(), &cfg).is_err());
    }

    #[test]
    fn finish_checks_row_count() {
        let plan = AssemblyPlan::new(&ShapeSpec::sphere(), &small()).unwrap();
        assert!(plan.finish(&[]).is_err());
    }
}
