//! First-order variation of the sphere multiplets and the plasmonic map.
//!
//! For a normalized eigenfunction `u = S[e]` with `‖∇u‖_{L²(Ω)} = 1`,
//!
//! ```text
//! dλ/dh(0) = ∫ a [ (λ - 1/2) |∇_∂ u|² + (λ + 1/2) (∂_n u|₋)² ] dS.
//! ```
//!
//! On the unit sphere `u = r^k Y_{k,l} / sqrt(k)` and `∂_n u|₋ = k Y_{k,l}/sqrt(k)`;
//! regrouping the tangential and normal parts gives the Hermitian multiplet
//! matrix
//!
//! ```text
//! M_{l,l'} = (1/k) ∫_{S²} a [ (λ_k - 1/2) ∇u_{k,l}·conj(∇u_{k,l'})
//!                             + k² Y_{k,l} conj(Y_{k,l'}) ] dσ
//! ```
//!
//! whose eigenvalues are the slopes of the `2k+1` analytic branches. The
//! diagonal is the variation formula itself; the off-diagonal entries are the
//! usual degenerate first-order perturbation coupling.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::harmonics::{HarmonicIndex, HarmonicTable};
use crate::np_operator::sphere_np_eigenvalue;
use crate::quadrature::build_grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `M` for one degree `k`, rows and columns ordered `l = -k..=k`.
#[derive(Debug, Clone)]
pub struct VariationMatrix {
    pub k: usize,
    pub matrix: DMatrix<Complex64>,
    /// Product grid used, `(n_theta, n_phi)`.
    pub grid: (usize, usize),
    /// Declared exactness of that grid.
    pub exactness: usize,
}

impl VariationMatrix {
    /// `Σ_l dλ_{k,l}/dh(0)`.
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    /// Branch slopes, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::linalg::SymmetricEigen::new(self.matrix.clone());
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn norm(&self) -> f64 {
        self.eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M*|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// Quadrature degree needed for `M_k` with a field of degree `field_degree`.
pub fn required_exactness(k: usize, field_degree: usize) -> usize {
    2 * k + field_degree + 2
}

/// Smallest product grid meeting [`required_exactness`].
pub fn default_grid(k: usize, field_degree: usize) -> (usize, usize) {
    let need = required_exactness(k, field_degree);
    ((need + 2) / 2, need + 1)
}

/// Builds `M_k` for the field `a` of `field` (its amplitude `h` is unused).
pub fn variation_matrix(
    k: usize,
    field: &ShapeSpec,
    grid: Option<(usize, usize)>,
) -> Result<VariationMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "k = 0 (λ = 1/2) is excluded from the variation formula".into(),
        ));
    }
    let (nt, np) = grid.unwrap_or_else(|| default_grid(k, field.degree()));
    let rule = build_grid(nt, np)?;
    let need = required_exactness(k, field.degree());
    if rule.exactness() < need {
        return Err(Error::InsufficientExactness {
            have: rule.exactness(),
            need,
        });
    }
    let size = 2 * k + 1;
    let lam_minus_half = sphere_np_eigenvalue(k) - 0.5;
    let k2 = (k * k) as f64;
    let table = HarmonicTable::new(k.max(field.degree()))?;
    let mut vals = alloc::vec![ZERO; table.len()];
    let mut m = DMatrix::<Complex64>::zeros(size, size);
    let base = k * k;
    let mut grads: Vec<[Complex64; 3]> = alloc::vec![[ZERO; 3]; size];
    for (w, &wt) in rule.nodes().iter().zip(rule.weights()) {
        table.eval_into(w.vec(), &mut vals);
        let a = field.a_from_table(&vals);
        if a == 0.0 {
            continue;
        }
        for (c, j) in HarmonicIndex::multiplet(k).enumerate() {
            grads[c] = HarmonicTable::gradient(&vals, j);
        }
        let y = &vals[base..base + size];
        let s = wt * a / k as f64;
        for r in 0..size {
            for c in 0..size {
                let gg = grads[r][0] * grads[c][0].conj()
                    + grads[r][1] * grads[c][1].conj()
                    + grads[r][2] * grads[c][2].conj();
                m[(r, c)] += (gg * lam_minus_half + y[r] * y[c].conj() * k2) * s;
            }
        }
    }
    Ok(VariationMatrix {
        k,
        matrix: m,
        grid: (nt, np),
        exactness: rule.exactness(),
    })
}

/// `trace(M_k)`; zero for every field `a` on the sphere.
pub fn equilibrium_check(k: usize, field: &ShapeSpec) -> Result<f64> {
    Ok(variation_matrix(k, field, None)?.trace())
}

/// `|trace| <= tol * max(norm, 1)`.
pub fn within_tolerance(trace: f64, norm: f64, tol: f64) -> bool {
    trace.abs() <= tol * norm.max(1.0)
}

/// A plasmonic eigenvalue (permittivity ratio), never `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmonValue(f64);

impl PlasmonValue {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon == -1.0 || !epsilon.is_finite() {
            return Err(Error::Domain(alloc::format!("ε = {epsilon} is not admissible")));
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

/// `ε = (-λ - 1/2)/(λ - 1/2)`.
pub fn plasmon_from_np(lambda: f64) -> Result<PlasmonValue> {
    if lambda == 0.5 {
        return Err(Error::Domain("λ = 1/2 has no plasmonic counterpart".into()));
    }
    PlasmonValue::new((-lambda - 0.5) / (lambda - 0.5))
}

/// `λ = (ε - 1)/(2(ε + 1))`.
pub fn np_from_plasmon(eps: PlasmonValue) -> f64 {
    (eps.0 - 1.0) / (2.0 * (eps.0 + 1.0))
}

/// `dε/dh = dλ/dh / (λ - 1/2)²`.
pub fn plasmon_slope(lambda: f64, dlambda: f64) -> Result<f64> {
    if lambda == 0.5 {
        return Err(Error::Domain("λ = 1/2 is a pole of the plasmonic map".into()));
    }
    Ok(dlambda / ((lambda - 0.5) * (lambda - 0.5)))
}
