//! Radially perturbed spheres `∂Ω(h) = {(1 + h a(ω)) ω : ω ∈ S²}`.
//!
//! On the unit sphere the outward normal is `ω` itself, so moving each point
//! by `h a n` is the radial graph `ρ = 1 + h a`. With `G = ∇_{S²} ρ`:
//!
//! ```text
//! point  = ρ ω
//! normal = (ρ ω - G) / sqrt(ρ² + |G|²)
//! dS/dσ  = ρ sqrt(ρ² + |G|²)
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::{basis_len, real_in_complex_basis, HarmonicIndex, HarmonicTable, SpherePoint};
use crate::quadrature::build_grid;
use crate::vec3::{Rotation, Vec3};

/// Upper bound on `max |h a|` accepted by [`ShapeSpec::new`].
pub const STAR_SHAPE_MARGIN: f64 = 0.9;

const CHECK_GRID: (usize, usize) = (64, 128);

/// Perturbation amplitude `h` and the field `a = Σ α_{k,m} Y^R_{k,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    h: f64,
    coeffs: Vec<(HarmonicIndex, f64)>,
    degree: usize,
    // a in the complex basis, flat order up to `degree`
    complex: Vec<Complex64>,
}

/// Position, unit outward normal and area ratio `dS/dσ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrame {
    pub point: Vec3,
    pub normal: Vec3,
    pub area_weight: f64,
}

impl SurfaceFrame {
    pub fn unit_sphere(omega: SpherePoint) -> Self {
        Self {
            point: omega.vec(),
            normal: omega.vec(),
            area_weight: 1.0,
        }
    }
}

impl ShapeSpec {
    /// Validates star-shapedness on a 64 x 128 grid.
    pub fn new(h: f64, coeffs: Vec<(HarmonicIndex, f64)>) -> Result<Self> {
        let shape = Self::unchecked(h, coeffs)?;
        shape.check_star_shaped()?;
        Ok(shape)
    }

    /// The unperturbed sphere.
    pub fn sphere() -> Self {
        Self {
            h: 0.0,
            coeffs: Vec::new(),
            degree: 0,
            complex: alloc::vec![Complex64::new(0.0, 0.0)],
        }
    }

    fn unchecked(h: f64, coeffs: Vec<(HarmonicIndex, f64)>) -> Result<Self> {
        if !h.is_finite() || coeffs.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite shape parameter".into()));
        }
        let degree = coeffs.iter().map(|(j, _)| j.k()).max().unwrap_or(0);
        if degree > crate::harmonics::MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                k: degree,
                max: crate::harmonics::MAX_DEGREE,
            });
        }
        let mut complex = alloc::vec![Complex64::new(0.0, 0.0); basis_len(degree)];
        for &(j, c) in &coeffs {
            let (terms, n) = real_in_complex_basis(j);
            for &(jj, w) in &terms[..n] {
                complex[jj.flat()] += w * c;
            }
        }
        Ok(Self {
            h,
            coeffs,
            degree,
            complex,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn coeffs(&self) -> &[(HarmonicIndex, f64)] {
        &self.coeffs
    }

    /// Highest harmonic degree present in `a`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The same field `a` at another amplitude.
    pub fn with_h(&self, h: f64) -> Result<Self> {
        let mut s = self.clone();
        s.h = h;
        s.check_star_shaped()?;
        Ok(s)
    }

    /// Coefficients of `a` in the complex basis, flat order up to [`Self::degree`].
    pub fn complex_coeffs(&self) -> &[Complex64] {
        &self.complex
    }

    fn check_star_shaped(&self) -> Result<()> {
        if self.h == 0.0 || self.coeffs.is_empty() {
            return Ok(());
        }
        let grid = build_grid(CHECK_GRID.0, CHECK_GRID.1)?;
        let max_abs = grid
            .nodes()
            .iter()
            .map(|&w| (self.h * self.eval_a(w)).abs())
            .fold(0.0, f64::max);
        if max_abs > STAR_SHAPE_MARGIN {
            return Err(Error::NotStarShaped {
                max_abs,
                limit: STAR_SHAPE_MARGIN,
            });
        }
        Ok(())
    }

    /// `a(ω)`.
    pub fn eval_a(&self, omega: SpherePoint) -> f64 {
        let table = HarmonicTable::new(self.degree).expect("degree validated");
        let mut vals = alloc::vec![Complex64::new(0.0, 0.0); table.len()];
        table.eval_into(omega.vec(), &mut vals);
        self.a_from_table(&vals)
    }

    /// `a` from solid-harmonic values at a unit point (table degree `>= self.degree()`).
    pub fn a_from_table(&self, vals: &[Complex64]) -> f64 {
        self.complex
            .iter()
            .zip(vals)
            .map(|(c, v)| (c * v).re)
            .sum()
    }

    /// Cartesian gradient of the degree-preserving solid extension of `a`.
    fn solid_gradient_from_table(&self, vals: &[Complex64]) -> Vec3 {
        let mut g = [0.0; 3];
        for (i, c) in self.complex.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let gi = HarmonicTable::gradient(vals, HarmonicIndex::from_flat(i));
            for d in 0..3 {
                g[d] += (c * gi[d]).re;
            }
        }
        Vec3::from(g)
    }

    /// Surface gradient `∇_{S²} a` at a unit point.
    pub fn surface_gradient_from_table(&self, omega: Vec3, vals: &[Complex64]) -> Vec3 {
        tangential_part(self.solid_gradient_from_table(vals), omega)
    }

    pub fn surface_gradient_a(&self, omega: SpherePoint) -> Vec3 {
        let table = HarmonicTable::new(self.degree).expect("degree validated");
        let mut vals = alloc::vec![Complex64::new(0.0, 0.0); table.len()];
        table.eval_into(omega.vec(), &mut vals);
        self.surface_gradient_from_table(omega.vec(), &vals)
    }

    /// Frame at `omega` given solid-harmonic values there (table degree `>= self.degree()`).
    pub fn frame_from_table(&self, omega: Vec3, vals: &[Complex64]) -> Result<SurfaceFrame> {
        if self.h == 0.0 {
            return Ok(SurfaceFrame {
                point: omega,
                normal: omega,
                area_weight: 1.0,
            });
        }
        let rho = 1.0 + self.h * self.a_from_table(vals);
        if rho.is_nan() || rho <= 0.0 {
            return Err(Error::NotStarShaped {
                max_abs: (rho - 1.0).abs(),
                limit: STAR_SHAPE_MARGIN,
            });
        }
        let g = self.surface_gradient_from_table(omega, vals).scale(self.h);
        let q = libm::sqrt(rho * rho + g.norm_sq());
        Ok(SurfaceFrame {
            point: omega.scale(rho),
            normal: (omega.scale(rho) - g).scale(1.0 / q),
            area_weight: rho * q,
        })
    }

    /// The surface frame at `ω`.
    pub fn frame(&self, omega: SpherePoint) -> Result<SurfaceFrame> {
        let table = HarmonicTable::new(self.degree)?;
        let mut vals = alloc::vec![Complex64::new(0.0, 0.0); table.len()];
        table.eval_into(omega.vec(), &mut vals);
        self.frame_from_table(omega.vec(), &vals)
    }

    /// The shape rotated rigidly by `rot`: its field is `a ∘ rot⁻¹`.
    ///
    /// Coefficients are re-projected onto the real basis with a rule exact
    /// for degree `2 * degree`, so no degree is lost or gained.
    pub fn rotated(&self, rot: &Rotation) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Ok(self.clone());
        }
        let d = self.degree;
        let grid = build_grid(d + 1, 2 * d + 1)?;
        let inv = rot.transpose();
        let back: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&w| self.eval_a(SpherePoint::from_unit_unchecked(inv.apply(w.vec()))))
            .collect();
        let mut coeffs = Vec::new();
        for j in HarmonicIndex::up_to(d) {
            let mut c = 0.0;
            for ((&w, &wt), &f) in grid.nodes().iter().zip(grid.weights()).zip(&back) {
                c += wt * f * crate::harmonics::eval_real_y(j, w)?;
            }
            if c.abs() > 1e-15 {
                coeffs.push((j, c));
            }
        }
        Self::unchecked(self.h, coeffs)
    }
}

/// `v - (v · n) n`.
pub fn tangential_part(v: Vec3, normal: Vec3) -> Vec3 {
    v - normal.scale(v.dot(normal))
}
