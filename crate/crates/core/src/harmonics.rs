//! Complex spherical and solid harmonics.
//!
//! The solid harmonic of degree `k` and order `l` is the homogeneous harmonic
//! polynomial
//!
//! ```text
//! u_{k,l} = r^k Y_{k,l}
//!         = C_{k,l} Σ_{p+q+s=k, p-q=l} (-w/2)^p (w̄/2)^q z^s / (p! q! s!)
//! C_{k,l} = sqrt((2k+1)/(4π) (k+l)! (k-l)!)
//! ```
//!
//! with `w = x + iy`. [`eval_solid`] evaluates that sum term by term. The
//! batch evaluator [`HarmonicTable`] regroups the same sum as
//! `(-w/2)^l Σ_q (-|w|²/4)^q z^(k-l-2q) / ((q+l)! q! (k-l-2q)!)` (and the
//! `w̄` mirror for negative orders), which is the form used in assembly.
//!
//! This normalization is orthonormal on S² and carries the phase
//! `conj(Y_{k,l}) = (-1)^l Y_{k,-l}`.
//!
//! # Real basis
//!
//! Perturbation fields use the real orthonormal basis
//!
//! ```text
//! m > 0:  Y^R_{k,m}  = sqrt(2) (-1)^m Re Y_{k,m}
//! m = 0:  Y^R_{k,0}  = Y_{k,0}
//! m < 0:  Y^R_{k,m}  = sqrt(2) (-1)^m Im Y_{k,|m|}
//! ```
//!
//! The `(-1)^m` undoes the Condon-Shortley sign, so `Y^R_{1,1} ∝ x`,
//! `Y^R_{1,-1} ∝ y` and `Y^R_{1,0} ∝ z`. [`real_in_complex_basis`] is the
//! single place this convention is encoded.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Largest degree accepted anywhere in the crate.
pub const MAX_DEGREE: usize = 60;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Degree `k` and order `l` of a spherical harmonic, with `|l| <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    k: usize,
    l: i64,
}

impl HarmonicIndex {
    pub fn new(k: usize, l: i64) -> Result<Self> {
        if l.unsigned_abs() as usize > k {
            return Err(Error::InvalidIndex { k, l });
        }
        Ok(Self { k, l })
    }

    pub fn k(self) -> usize {
        self.k
    }

    pub fn l(self) -> i64 {
        self.l
    }

    /// Position in the degree-major ordering `(0,0), (1,-1), (1,0), (1,1), ...`.
    pub fn flat(self) -> usize {
        ((self.k * self.k + self.k) as i64 + self.l) as usize
    }

    pub fn from_flat(i: usize) -> Self {
        let k = libm::sqrt(i as f64) as usize;
        // guard the float square root at perfect squares
        let k = if (k + 1) * (k + 1) <= i { k + 1 } else if k * k > i { k - 1 } else { k };
        let l = i as i64 - (k * k + k) as i64;
        Self { k, l }
    }

    /// Every index with degree at most `degree`, in flat order.
    pub fn up_to(degree: usize) -> impl Iterator<Item = HarmonicIndex> {
        (0..=degree).flat_map(|k| (-(k as i64)..=k as i64).map(move |l| HarmonicIndex { k, l }))
    }

    /// The `2k + 1` indices of degree `k`.
    pub fn multiplet(k: usize) -> impl Iterator<Item = HarmonicIndex> {
        (-(k as i64)..=k as i64).map(move |l| HarmonicIndex { k, l })
    }
}

/// Number of harmonics with degree at most `degree`.
pub fn basis_len(degree: usize) -> usize {
    (degree + 1) * (degree + 1)
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    /// Projects a non-zero vector onto the sphere.
    pub fn from_cartesian(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "cannot project {:?} onto the sphere",
                v
            )));
        }
        Ok(Self(v.scale(1.0 / n)))
    }

    /// Polar angle `theta` from the +z axis and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = libm::sincos(theta);
        let (sp, cp) = libm::sincos(phi);
        Self(Vec3::new(st * cp, st * sp, ct))
    }

    pub(crate) fn from_unit_unchecked(v: Vec3) -> Self {
        Self(v)
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    pub fn theta(self) -> f64 {
        libm::atan2(libm::hypot(self.0.x, self.0.y), self.0.z)
    }

    /// Azimuth in `[0, 2π)`.
    pub fn phi(self) -> f64 {
        let p = libm::atan2(self.0.y, self.0.x);
        if p < 0.0 {
            p + 2.0 * PI
        } else {
            p
        }
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k > MAX_DEGREE {
        Err(Error::DegreeOverflow { k, max: MAX_DEGREE })
    } else {
        Ok(())
    }
}

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

fn ln_norm_constant(k: usize, l: i64) -> f64 {
    // fixed summation order keeps C_{k,l} == C_{k,-l} bit for bit
    let m = l.unsigned_abs() as usize;
    0.5 * (libm::log((2 * k + 1) as f64 / (4.0 * PI)) + ln_factorial(k + m) + ln_factorial(k - m))
}

// n! for n <= MAX_DEGREE, exact through 22! and correctly rounded products after.
const FACTORIALS: [f64; MAX_DEGREE + 1] = {
    let mut t = [1.0; MAX_DEGREE + 1];
    let mut i = 1;
    while i <= MAX_DEGREE {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

// Monomial weight C_{k,l} / (p! q! s!). Only C goes through log-gamma, so the
// ratios between terms (which carry harmonicity) stay exact to rounding.
fn monomial_coeff(c: f64, p: usize, q: usize, s: usize) -> f64 {
    c / (FACTORIALS[p] * FACTORIALS[q] * FACTORIALS[s])
}

/// `C_{k,l} = sqrt((2k+1)/(4π) (k+l)! (k-l)!)`, computed through log-gamma.
pub fn norm_constant(idx: HarmonicIndex) -> Result<f64> {
    check_degree(idx.k)?;
    Ok(libm::exp(ln_norm_constant(idx.k, idx.l)))
}

fn cpowi(z: Complex64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc *= z;
    }
    acc
}

/// Solid harmonic `u_{k,l}(p) = |p|^k Y_{k,l}(p/|p|)` from the monomial triple sum.
pub fn eval_solid(idx: HarmonicIndex, p: Vec3) -> Result<Complex64> {
    check_degree(idx.k)?;
    let k = idx.k;
    let l = idx.l;
    let a = Complex64::new(-p.x / 2.0, -p.y / 2.0);
    let b = Complex64::new(p.x / 2.0, -p.y / 2.0);
    let c = libm::exp(ln_norm_constant(k, l));
    let mut sum = ZERO;
    // p - q = l and p + q + s = k
    for q in 0..=k {
        let pp = q as i64 + l;
        if pp < 0 {
            continue;
        }
        let pp = pp as usize;
        if pp + q > k {
            break;
        }
        let s = k - pp - q;
        let coef = monomial_coeff(c, pp, q, s);
        sum += cpowi(a, pp) * cpowi(b, q) * (coef * libm::pow(p.z, s as f64));
    }
    Ok(sum)
}

/// `Y_{k,l}(ω)`.
pub fn eval_y(idx: HarmonicIndex, omega: SpherePoint) -> Result<Complex64> {
    eval_solid(idx, omega.vec())
}

/// Recurrence weights turning degree-`(k-1)` harmonics into the Wirtinger
/// derivatives of `u_{k,l}`: returns `(d/dw, d/dw̄, d/dz)` coefficients
/// multiplying `u_{k-1,l-1}`, `u_{k-1,l+1}`, `u_{k-1,l}` respectively.
fn gradient_weights(k: usize, l: i64) -> (f64, f64, f64) {
    let k = k as i64;
    let denom = libm::sqrt((2 * k - 1) as f64);
    let twok1 = (2 * k + 1) as f64;
    let cw = -libm::sqrt(((k + l - 1) * (k + l)) as f64 * twok1) / (2.0 * denom);
    let cwb = libm::sqrt(((k - l - 1) * (k - l)) as f64 * twok1) / (2.0 * denom);
    let cz = libm::sqrt(((k + l) * (k - l)) as f64 * twok1) / denom;
    (cw, cwb, cz)
}

fn wirtinger_to_cartesian(dw: Complex64, dwb: Complex64, dz: Complex64) -> [Complex64; 3] {
    let i = Complex64::new(0.0, 1.0);
    [dw + dwb, i * (dw - dwb), dz]
}

/// Cartesian gradient `(∂x, ∂y, ∂z) u_{k,l}` at `p`, from the closed-form
/// degree-lowering recurrences. Zero for `k = 0`.
pub fn grad_solid(idx: HarmonicIndex, p: Vec3) -> Result<[Complex64; 3]> {
    check_degree(idx.k)?;
    if idx.k == 0 {
        return Ok([ZERO; 3]);
    }
    let (k, l) = (idx.k, idx.l);
    let (cw, cwb, cz) = gradient_weights(k, l);
    let lower = |ll: i64| -> Result<Complex64> {
        match HarmonicIndex::new(k - 1, ll) {
            Ok(j) => eval_solid(j, p),
            Err(_) => Ok(ZERO),
        }
    };
    let dw = lower(l - 1)? * cw;
    let dwb = lower(l + 1)? * cwb;
    let dz = lower(l)? * cz;
    Ok(wirtinger_to_cartesian(dw, dwb, dz))
}

/// `Σ_l |Y_{k,l}(ω)|²`; equals `(2k+1)/(4π)` for every ω.
pub fn unsold_sum(k: usize, omega: SpherePoint) -> Result<f64> {
    let mut s = 0.0;
    for idx in HarmonicIndex::multiplet(k) {
        s += eval_y(idx, omega)?.norm_sqr();
    }
    Ok(s)
}

/// `Σ_l |∇u_{k,l}(ω)|²`; equals `k(2k+1)²/(4π)` on the unit sphere.
pub fn grad_sum(k: usize, omega: SpherePoint) -> Result<f64> {
    let mut s = 0.0;
    for idx in HarmonicIndex::multiplet(k) {
        let g = grad_solid(idx, omega.vec())?;
        s += g.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    Ok(s)
}

/// Expansion of the real harmonic `Y^R_{k,m}` in the complex basis.
///
/// Returns one term for `m = 0` and two otherwise.
pub fn real_in_complex_basis(idx: HarmonicIndex) -> ([(HarmonicIndex, Complex64); 2], usize) {
    let (k, m) = (idx.k, idx.l);
    let sgn = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let r = 1.0 / SQRT_2;
    let pos = HarmonicIndex { k, l: m.abs() };
    let neg = HarmonicIndex { k, l: -m.abs() };
    if m == 0 {
        ([(idx, Complex64::new(1.0, 0.0)), (idx, ZERO)], 1)
    } else if m > 0 {
        // ((-1)^m Y_{k,m} + Y_{k,-m}) / sqrt(2)
        (
            [(pos, Complex64::new(sgn * r, 0.0)), (neg, Complex64::new(r, 0.0))],
            2,
        )
    } else {
        // -i ((-1)^m Y_{k,|m|} - Y_{k,-|m|}) / sqrt(2)
        (
            [(pos, Complex64::new(0.0, -sgn * r)), (neg, Complex64::new(0.0, r))],
            2,
        )
    }
}

/// Real orthonormal harmonic `Y^R_{k,m}(ω)`.
pub fn eval_real_y(idx: HarmonicIndex, omega: SpherePoint) -> Result<f64> {
    let (terms, n) = real_in_complex_basis(idx);
    let mut v = ZERO;
    for &(j, c) in &terms[..n] {
        v += c * eval_y(j, omega)?;
    }
    Ok(v.re)
}

/// Cartesian gradient of the real solid harmonic `r^k Y^R_{k,m}`.
pub fn grad_real_solid(idx: HarmonicIndex, p: Vec3) -> Result<Vec3> {
    let (terms, n) = real_in_complex_basis(idx);
    let mut g = [ZERO; 3];
    for &(j, c) in &terms[..n] {
        let gj = grad_solid(j, p)?;
        for d in 0..3 {
            g[d] += c * gj[d];
        }
    }
    Ok(Vec3::new(g[0].re, g[1].re, g[2].re))
}

/// Batch evaluator of every solid harmonic up to a fixed degree.
///
/// Values are written in [`HarmonicIndex::flat`] order. This is the
/// evaluation path used inside Galerkin assembly, where each quadrature node
/// needs the whole basis at once.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    degree: usize,
    // coefficient runs per (k, m >= 0): coeffs[offsets[i]..offsets[i+1]]
    offsets: Vec<usize>,
    coeffs: Vec<f64>,
}

impl HarmonicTable {
    pub fn new(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        let mut offsets = Vec::new();
        let mut coeffs = Vec::new();
        offsets.push(0);
        for k in 0..=degree {
            for m in 0..=k {
                let c = libm::exp(ln_norm_constant(k, m as i64));
                let mut q = 0;
                while m + 2 * q <= k {
                    let s = k - m - 2 * q;
                    let mag = monomial_coeff(c, q + m, q, s) / libm::ldexp(1.0, 2 * q as i32);
                    coeffs.push(if q % 2 == 0 { mag } else { -mag });
                    q += 1;
                }
                offsets.push(coeffs.len());
            }
        }
        Ok(Self {
            degree,
            offsets,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        basis_len(self.degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fills `out[..self.len()]` with `u_{k,l}(p)`.
    pub fn eval_into(&self, p: Vec3, out: &mut [Complex64]) {
        let n = self.degree;
        let mut zpow = [0.0f64; MAX_DEGREE + 1];
        let mut rpow = [0.0f64; MAX_DEGREE / 2 + 1];
        zpow[0] = 1.0;
        for j in 1..=n {
            zpow[j] = zpow[j - 1] * p.z;
        }
        let rho2 = p.x * p.x + p.y * p.y;
        rpow[0] = 1.0;
        for j in 1..=n / 2 {
            rpow[j] = rpow[j - 1] * rho2;
        }
        let a = Complex64::new(-p.x / 2.0, -p.y / 2.0);
        let b = Complex64::new(p.x / 2.0, -p.y / 2.0);
        let mut run = 0;
        for k in 0..=n {
            let base = k * k + k;
            let mut apow = Complex64::new(1.0, 0.0);
            let mut bpow = Complex64::new(1.0, 0.0);
            for m in 0..=k {
                let c = &self.coeffs[self.offsets[run]..self.offsets[run + 1]];
                run += 1;
                let mut s = 0.0;
                for (q, &cq) in c.iter().enumerate() {
                    s += cq * rpow[q] * zpow[k - m - 2 * q];
                }
                out[base + m] = apow * s;
                if m > 0 {
                    out[base - m] = bpow * s;
                }
                apow *= a;
                bpow *= b;
            }
        }
    }

    /// Cartesian gradient of `u_{idx}` given table values `vals` evaluated at
    /// the same point; needs `self.degree >= idx.k() - 1`.
    pub fn gradient(vals: &[Complex64], idx: HarmonicIndex) -> [Complex64; 3] {
        let (k, l) = (idx.k, idx.l);
        if k == 0 {
            return [ZERO; 3];
        }
        let (cw, cwb, cz) = gradient_weights(k, l);
        let base = (k - 1) * (k - 1) + (k - 1);
        let km1 = (k - 1) as i64;
        let at = |ll: i64| {
            if ll.abs() <= km1 {
                vals[(base as i64 + ll) as usize]
            } else {
                ZERO
            }
        };
        wirtinger_to_cartesian(at(l - 1) * cw, at(l + 1) * cwb, at(l) * cz)
    }
}
