//! Product quadrature on the unit sphere.
//!
//! [`build_grid`] is Gauss-Legendre in `cos θ` times the trapezoid rule in
//! `φ`. [`rotated_grid`] re-centres a rule on an arbitrary pole and swaps
//! `cos θ'` for `s = sin(θ'/2)`, so that integrands behaving like
//! `1/|x - y|` near the pole become smooth in `s`; this is how the weakly
//! singular NP kernel is integrated.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::SpherePoint;
use crate::vec3::{Rotation, Vec3};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (alloc::vec![0.0], alloc::vec![2.0]);
    }
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n from the Tricomi initial guess
        let mut t = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() <= 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

/// Nodes and positive weights on S² (weights in steradians).
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
    exactness: usize,
}

impl QuadratureGrid {
    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest degree `k` such that every `Y_{k,l}` is integrated exactly.
    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same rule with every node mapped through `rot`.
    pub fn rotated(&self, rot: &Rotation) -> Self {
        Self {
            nodes: self
                .nodes
                .iter()
                .map(|p| SpherePoint::from_unit_unchecked(rot.apply(p.vec())))
                .collect(),
            weights: self.weights.clone(),
            exactness: self.exactness,
        }
    }

    /// `Σ w_i f(ω_i)`.
    pub fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(SpherePoint) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&p, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(p);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(non_finite(i, p));
            }
            acc += v * w;
        }
        Ok(acc)
    }

    pub fn integrate_real<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(SpherePoint) -> f64,
    {
        let mut acc = 0.0;
        for (i, (&p, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(p);
            if !v.is_finite() {
                return Err(non_finite(i, p));
            }
            acc += v * w;
        }
        Ok(acc)
    }
}

fn non_finite(index: usize, p: SpherePoint) -> Error {
    let v = p.vec();
    Error::NonFiniteIntegrand {
        index,
        x: v.x,
        y: v.y,
        z: v.z,
    }
}

fn check_sizes(n_theta: usize, n_phi: usize) -> Result<()> {
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "grid needs n_theta >= 1 and n_phi >= 1, got {n_theta}x{n_phi}"
        )));
    }
    Ok(())
}

/// Gauss-Legendre in `cos θ` x uniform trapezoid in `φ`.
///
/// Exact for every `Y_{k,l}` with `k <= min(2 n_theta - 1, n_phi - 1)`.
pub fn build_grid(n_theta: usize, n_phi: usize) -> Result<QuadratureGrid> {
    check_sizes(n_theta, n_phi)?;
    let (x, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (&ct, &wt) in x.iter().zip(&w) {
        let st = libm::sqrt((1.0 - ct * ct).max(0.0));
        for j in 0..n_phi {
            let (sp, cp) = libm::sincos(j as f64 * dphi);
            nodes.push(SpherePoint::from_unit_unchecked(Vec3::new(st * cp, st * sp, ct)));
            weights.push(wt * dphi);
        }
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        exactness: (2 * n_theta - 1).min(n_phi - 1),
    })
}

/// Polar rule centred on the north pole in the variable `s = sin(θ/2)`.
///
/// The area element is `dσ = 4 s ds dφ`, which absorbs a `1/|x - y|`
/// singularity at the pole (`|x - y| = 2s` on the unit sphere). Exact for
/// `Y_{k,l}` with `k <= min(n_theta - 1, n_phi - 1)`.
pub fn polar_rule(n_theta: usize, n_phi: usize) -> Result<QuadratureGrid> {
    check_sizes(n_theta, n_phi)?;
    let (x, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (&xi, &wi) in x.iter().zip(&w) {
        let s = 0.5 * (xi + 1.0);
        let ct = 1.0 - 2.0 * s * s;
        let st = 2.0 * s * libm::sqrt((1.0 - s * s).max(0.0));
        let ws = 0.5 * wi * 4.0 * s * dphi;
        for j in 0..n_phi {
            let (sp, cp) = libm::sincos(j as f64 * dphi);
            nodes.push(SpherePoint::from_unit_unchecked(Vec3::new(st * cp, st * sp, ct)));
            weights.push(ws);
        }
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        exactness: (n_theta - 1).min(n_phi - 1),
    })
}

/// [`polar_rule`] rotated so that its pole sits at `pole`.
pub fn rotated_grid(pole: SpherePoint, n_theta: usize, n_phi: usize) -> Result<QuadratureGrid> {
    Ok(polar_rule(n_theta, n_phi)?.rotated(&Rotation::north_to(pole.vec())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{eval_y, HarmonicIndex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(k: usize, l: i64) -> HarmonicIndex {
        HarmonicIndex::new(k, l).unwrap()
    }

    #[test]
    fn gauss_legendre_small_cases() {
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, alloc::vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / libm::sqrt(3.0)).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-15);
        for n in [5, 16, 48, 97] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for t^(2n-2)
            let m = (2 * n - 2) as i32;
            let s: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.powi(m)).sum();
            assert!((s - 2.0 / (m as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn build_grid_examples() {
        let g = build_grid(8, 16).unwrap();
        let area = g.integrate(|_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((area.re / (4.0 * PI) - 1.0).abs() <= 1e-14);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        let v = g.integrate(|w| eval_y(idx(3, 2), w).unwrap()).unwrap();
        assert!(v.norm() <= 1e-13);
        let n = g.integrate(|w| Complex64::new(eval_y(idx(5, 3), w).unwrap().norm_sqr(), 0.0));
        assert!((n.unwrap().re - 1.0).abs() <= 1e-12);
        assert!(build_grid(0, 4).is_err());
    }

    #[test]
    fn integrate_reports_non_finite_node() {
        let g = build_grid(2, 3).unwrap();
        let err = g
            .integrate_real(|w| if w.vec().z > 0.0 { f64::NAN } else { 1.0 })
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn declared_exactness_is_exact() {
        for (nt, np) in [(4, 9), (6, 8), (5, 12)] {
            let g = build_grid(nt, np).unwrap();
            let e = g.exactness();
            for j in HarmonicIndex::up_to(e) {
                let v = g.integrate(|w| eval_y(j, w).unwrap()).unwrap();
                let expect = if j.k() == 0 { libm::sqrt(4.0 * PI) } else { 0.0 };
                assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12, "{j:?}");
            }
            let polar = rotated_grid(
                SpherePoint::from_cartesian(Vec3::new(0.3, -0.2, 0.4)).unwrap(),
                nt,
                np,
            )
            .unwrap();
            for j in HarmonicIndex::up_to(polar.exactness()) {
                let v = polar.integrate(|w| eval_y(j, w).unwrap()).unwrap();
                let expect = if j.k() == 0 { libm::sqrt(4.0 * PI) } else { 0.0 };
                assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12, "{j:?}");
            }
        }
    }

    fn smooth(w: SpherePoint) -> f64 {
        let v = w.vec();
        libm::exp(v.x - 0.5 * v.y) * libm::cos(2.0 * v.z) + v.x * v.y * v.z
    }

    #[test]
    fn rotated_grid_agrees_on_smooth_integrand() {
        let reference = build_grid(24, 48).unwrap().integrate_real(smooth).unwrap();
        let pole = SpherePoint::from_cartesian(Vec3::new(-0.5, 0.7, 0.1)).unwrap();
        let rot = rotated_grid(pole, 48, 48).unwrap();
        assert!((rot.integrate_real(smooth).unwrap() - reference).abs() <= 1e-12);
    }

    #[test]
    fn rotated_grid_resolves_inverse_distance() {
        // On the unit sphere ∫ 1/|x - y| dσ(y) = 4π for every x on the sphere.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let x = SpherePoint::from_angles(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
            let g = rotated_grid(x, 8, 4).unwrap();
            let v = g
                .integrate_real(|y| 1.0 / (x.vec() - y.vec()).norm())
                .unwrap();
            assert!((v - 4.0 * PI).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn pole_on_unrotated_node_is_finite() {
        let base = build_grid(6, 12).unwrap();
        let pole = base.nodes()[7];
        let g = rotated_grid(pole, 6, 12).unwrap();
        assert!(g.weights().iter().all(|&w| w > 0.0 && w.is_finite()));
        assert!(g.nodes().iter().all(|p| p.vec().is_finite()));
        let area: f64 = g.weights().iter().sum();
        assert!((area / (4.0 * PI) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rotation_invariance() {
        let g = build_grid(20, 40).unwrap();
        let base = g.integrate_real(smooth).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let r = Rotation::from_quaternion(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let v = g
                .integrate_real(|w| smooth(SpherePoint::from_unit_unchecked(r.apply(w.vec()))))
                .unwrap();
            assert!((v - base).abs() <= 1e-12);
        }
    }
}
