//! Following the `2k+1` eigenvalues that bifurcate from `1/(2(2k+1))`.

use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::harmonics::HarmonicIndex;

use super::eigen::{eigensolve, EigenDecomposition};
use super::{sphere_np_eigenvalue, Assembler, GalerkinConfig, NpSystem};

/// The branches `λ_{k,l}(h)` of one degree.
#[derive(Debug, Clone)]
pub struct Multiplet {
    pub k: usize,
    /// `2k + 1` real parts, descending.
    pub values: Vec<f64>,
    /// Matching eigenvectors, one column per entry of `values`.
    pub vectors: DMatrix<Complex64>,
    /// Fraction of each eigenvector's norm carried by degree-`k` coefficients.
    pub overlaps: Vec<f64>,
    /// Largest imaginary part dropped from the selected eigenvalues.
    pub residual_imag: f64,
}

impl Multiplet {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Half-width of the window around `1/(2(2k+1))` a branch may occupy.
    pub fn window(k: usize) -> f64 {
        0.25 / (2 * k + 1) as f64
    }

    /// The unperturbed multiplet: basis vectors and the exact sphere value.
    pub fn sphere(k: usize, degree: usize) -> Self {
        let n = (degree + 1) * (degree + 1);
        let mut vectors = DMatrix::<Complex64>::zeros(n, 2 * k + 1);
        for (c, j) in HarmonicIndex::multiplet(k).enumerate() {
            vectors[(j.flat(), c)] = Complex64::new(1.0, 0.0);
        }
        Self {
            k,
            values: alloc::vec![sphere_np_eigenvalue(k); 2 * k + 1],
            vectors,
            overlaps: alloc::vec![1.0; 2 * k + 1],
            residual_imag: 0.0,
        }
    }
}

fn degree_overlap(v: nalgebra::DVectorView<'_, Complex64>, k: usize) -> f64 {
    let total: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let part: f64 = HarmonicIndex::multiplet(k).map(|j| v[j.flat()].norm_sqr()).sum();
    part / total
}

/// Picks the degree-`k` multiplet out of a full decomposition.
///
/// Eigenpairs are ranked greedily by overlap with the degree-`k` coefficient
/// block, ties broken by distance to the sphere eigenvalue, and the first
/// `2k + 1` are kept. Unlike [`track_multiplet`], `k = 0` is allowed here.
pub fn select_multiplet(decomp: &EigenDecomposition, k: usize) -> Result<Multiplet> {
    let n = decomp.vectors.nrows();
    let size = 2 * k + 1;
    if (k + 1) * (k + 1) > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "degree {k} is outside the basis range 0..={}",
            libm::sqrt(n as f64) as usize - 1
        )));
    }
    let target = sphere_np_eigenvalue(k);
    let mut ranked: Vec<(usize, f64)> = (0..decomp.values.len())
        .map(|i| (i, degree_overlap(decomp.vectors.column(i), k)))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.total_cmp(&a.1).then_with(|| {
            let da = (decomp.values[a.0].re - target).abs();
            let db = (decomp.values[b.0].re - target).abs();
            da.total_cmp(&db)
        })
    });
    let mut chosen: Vec<(usize, f64)> = ranked[..size].to_vec();
    chosen.sort_by(|a, b| decomp.values[b.0].re.total_cmp(&decomp.values[a.0].re));

    let window = Multiplet::window(k);
    for &(i, _) in &chosen {
        let v = decomp.values[i].re;
        if (v - target).abs() > window {
            return Err(Error::ClusterOverlap {
                k,
                reason: alloc::format!(
                    "branch value {v:.6} lies outside {target:.6} ± {window:.6}; reduce h"
                ),
            });
        }
    }
    let weakest = chosen.iter().map(|c| c.1).fold(1.0, f64::min);
    let strongest_rest = ranked[size..].iter().map(|c| c.1).fold(0.0, f64::max);
    if weakest <= strongest_rest {
        return Err(Error::ClusterOverlap {
            k,
            reason: "eigenvector overlaps do not separate the multiplet".to_string(),
        });
    }

    let mut vectors = DMatrix::<Complex64>::zeros(n, size);
    for (c, &(i, _)) in chosen.iter().enumerate() {
        vectors.set_column(c, &DVector::from_column_slice(decomp.vectors.column(i).as_slice()));
    }
    Ok(Multiplet {
        k,
        values: chosen.iter().map(|&(i, _)| decomp.values[i].re).collect(),
        vectors,
        overlaps: chosen.iter().map(|c| c.1).collect(),
        residual_imag: chosen
            .iter()
            .map(|&(i, _)| decomp.values[i].im.abs())
            .fold(0.0, f64::max),
    })
}

/// The degree-`k` multiplet of an assembled system.
///
/// At `h = 0` (or `a = 0`) the sphere answer is returned without touching the
/// matrix.
pub fn track_multiplet(system: &NpSystem, k: usize) -> Result<Multiplet> {
    if k == 0 || k > system.config.degree {
        return Err(Error::InvalidArgument(alloc::format!(
            "degree {k} is outside the tracked range 1..={}",
            system.config.degree
        )));
    }
    if system.shape.h() == 0.0 || system.shape.coeffs().is_empty() {
        return Ok(Multiplet::sphere(k, system.config.degree));
    }
    select_multiplet(&eigensolve(system)?, k)
}

/// Central-difference slopes of a multiplet at `h = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSlopes {
    pub k: usize,
    /// Step magnitudes used, descending.
    pub steps: Vec<f64>,
    /// Per-branch slopes (descending) at the smallest step.
    pub raw_branch: Vec<f64>,
    /// Slope of the multiplet sum at the smallest step.
    pub raw_sum: f64,
    /// After one Richardson step over the two smallest steps (equal to the
    /// raw values when only one step is given).
    pub branch: Vec<f64>,
    pub sum: f64,
}

fn central(
    assembler: &dyn Assembler,
    field: &ShapeSpec,
    k: usize,
    h: f64,
    config: &GalerkinConfig,
) -> Result<(Vec<f64>, f64)> {
    let plus = track_multiplet(&assembler.assemble(&field.with_h(h)?, config)?, k)?;
    let minus = track_multiplet(&assembler.assemble(&field.with_h(-h)?, config)?, k)?;
    // A branch keeps its eigenvector to first order across h = 0 (the limits
    // are eigenvectors of M for both signs), so pair by greedy overlap. Pairing
    // by rank instead turns a purely quadratic splitting into a spurious slope.
    let size = plus.values.len();
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            let ov = plus.vectors.column(i).dotc(&minus.vectors.column(j)).norm();
            cand.push((ov, i, j));
        }
    }
    cand.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut used_p = alloc::vec![false; size];
    let mut used_m = alloc::vec![false; size];
    let mut branch = Vec::with_capacity(size);
    for (_, i, j) in cand {
        if !used_p[i] && !used_m[j] {
            used_p[i] = true;
            used_m[j] = true;
            branch.push((plus.values[i] - minus.values[j]) / (2.0 * h));
        }
    }
    branch.sort_by(|a, b| b.total_cmp(a));
    Ok((branch, (plus.sum() - minus.sum()) / (2.0 * h)))
}

/// First-order slopes `dλ_{k,l}/dh (0)` by central differences in `h`.
///
/// `steps` are step sizes; their signs are ignored and each is evaluated at
/// `±h`. The field `a` is taken from `field` (its own `h` is ignored).
pub fn fd_multiplet_slopes(
    assembler: &dyn Assembler,
    field: &ShapeSpec,
    k: usize,
    steps: &[f64],
    config: &GalerkinConfig,
) -> Result<FdSlopes> {
    let mut hs: Vec<f64> = steps.iter().map(|h| h.abs()).filter(|&h| h > 0.0).collect();
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    if hs.is_empty() {
        return Err(Error::InvalidArgument("need at least one non-zero step".into()));
    }
    let n = hs.len();
    let (raw_branch, raw_sum) = central(assembler, field, k, hs[n - 1], config)?;
    let (branch, sum) = if n >= 2 {
        let (coarse_branch, coarse_sum) = central(assembler, field, k, hs[n - 2], config)?;
        let ratio = hs[n - 2] / hs[n - 1];
        let r2 = ratio * ratio;
        let rich = |fine: f64, coarse: f64| (r2 * fine - coarse) / (r2 - 1.0);
        (
            raw_branch
                .iter()
                .zip(&coarse_branch)
                .map(|(&f, &c)| rich(f, c))
                .collect(),
            rich(raw_sum, coarse_sum),
        )
    } else {
        (raw_branch.clone(), raw_sum)
    };
    Ok(FdSlopes {
        k,
        steps: hs,
        raw_branch,
        raw_sum,
        branch,
        sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::np_operator::eigen::eigen_dense;
    use crate::np_operator::SerialAssembler;

    fn cfg() -> GalerkinConfig {
        GalerkinConfig {
            degree: 5,
            outer: (16, 32),
            inner: (24, 32),
        }
    }

    fn y20(h: f64) -> ShapeSpec {
        ShapeSpec::new(h, alloc::vec![(HarmonicIndex::new(2, 0).unwrap(), 1.0)]).unwrap()
    }

    #[test]
    fn sphere_multiplet_is_exact() {
        let sys = crate::np_operator::assemble(&ShapeSpec::sphere(), &cfg()).unwrap();
        let m = track_multiplet(&sys, 2).unwrap();
        assert_eq!(m.values, alloc::vec![0.1; 5]);
        for (c, j) in HarmonicIndex::multiplet(2).enumerate() {
            assert_eq!(m.vectors[(j.flat(), c)], Complex64::new(1.0, 0.0));
        }
        assert!(track_multiplet(&sys, 0).is_err());
        assert!(track_multiplet(&sys, 6).is_err());
    }

    #[test]
    fn perturbed_multiplets_stay_near_sphere_values() {
        let sys = SerialAssembler.assemble(&y20(0.02), &cfg()).unwrap();
        let m2 = track_multiplet(&sys, 2).unwrap();
        assert_eq!(m2.values.len(), 5);
        for v in &m2.values {
            assert!((v - 0.1).abs() <= 0.01);
        }
        let m1 = track_multiplet(&sys, 1).unwrap();
        assert!(m1.overlaps.iter().all(|&o| o > 0.9));
        assert!(m1.residual_imag < 1e-8);
    }

    #[test]
    fn multiplet_sum_ignores_eigen_ordering() {
        let sys = SerialAssembler.assemble(&y20(0.05), &cfg()).unwrap();
        let decomp = eigensolve(&sys).unwrap();
        let base = select_multiplet(&decomp, 1).unwrap();
        // reverse the eigenpair order and reselect
        let n = decomp.values.len();
        let mut shuffled = decomp.clone();
        for i in 0..n {
            shuffled.values[i] = decomp.values[n - 1 - i];
            shuffled
                .vectors
                .set_column(i, &decomp.vectors.column(n - 1 - i).into_owned());
        }
        let again = select_multiplet(&shuffled, 1).unwrap();
        assert_eq!(base.sum(), again.sum());
        assert_eq!(base.values, again.values);
    }

    #[test]
    fn overlapping_clusters_are_reported() {
        // two clusters whose eigenvectors live on the wrong blocks
        let n = 4;
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        a[(0, 0)] = Complex64::new(0.5, 0.0);
        for i in 1..n {
            a[(i, i)] = Complex64::new(0.45, 0.0);
        }
        let decomp = eigen_dense(&a).unwrap();
        let err = select_multiplet(&decomp, 1).unwrap_err();
        assert!(matches!(err, Error::ClusterOverlap { .. }));
    }

    #[test]
    fn dilation_slopes_vanish() {
        let field = ShapeSpec::new(
            0.0,
            alloc::vec![(HarmonicIndex::new(0, 0).unwrap(), libm::sqrt(4.0 * core::f64::consts::PI))],
        )
        .unwrap();
        let s = fd_multiplet_slopes(&SerialAssembler, &field, 1, &[0.04, 0.02], &cfg()).unwrap();
        assert_eq!(s.steps, alloc::vec![0.04, 0.02]);
        for v in s.branch.iter().chain(core::iter::once(&s.sum)) {
            assert!(v.abs() <= 1e-6, "{v}");
        }
    }

    #[test]
    fn translation_slopes_vanish_despite_quadratic_splitting() {
        // (1 + h a) with deg a = 1 is a shifted sphere up to O(h^2); the
        // multiplet splits quadratically and every first-order slope is zero
        let field = ShapeSpec::new(
            0.0,
            alloc::vec![
                (HarmonicIndex::new(1, 1).unwrap(), 1.0),
                (HarmonicIndex::new(1, -1).unwrap(), 0.3),
            ],
        )
        .unwrap();
        let s = fd_multiplet_slopes(&SerialAssembler, &field, 2, &[0.04, 0.02], &cfg()).unwrap();
        for v in s.raw_branch.iter().chain(&s.branch) {
            assert!(v.abs() <= 1e-9, "{v}");
        }
    }
}
