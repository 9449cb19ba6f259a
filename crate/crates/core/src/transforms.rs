//! The circular Bargmann transforms `B_γ` and `B_{γ,m}` as quadrature-backed
//! operators from circle functions to functions on the disk.
//!
//! Both are antilinear: the input enters conjugated, so that the `n`-th ket is
//! sent to the `n`-th basis element of the target space. At each disk point
//! the circle rule is split at the peak of the kernel `(1 − z e^{iθ})^{−1−γ/2}`
//! (see [`CircleRule::focused_on`]); without this, points near the boundary
//! are badly under-resolved.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bases::{kets_upto, ModelParams};
use crate::coherent::level_factor;
use crate::error::{check_gamma, check_in_disk};
use crate::quadrature::{pairwise_sum, CircleFunction, CircleRule, DiskRule, QuadratureRule};
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Samples of a disk function at labelled points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub params: ModelParams,
    pub provenance: String,
}

impl DiskGrid {
    pub fn new(
        points: Vec<Complex64>,
        values: Vec<Complex64>,
        params: ModelParams,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Parameter(format!(
                "grid has {} points but {} values",
                points.len(),
                values.len()
            )));
        }
        for &z in &points {
            check_in_disk(z)?;
        }
        Ok(Self { points, values, params, provenance: provenance.into() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Polar grid: `n_radial` radii evenly spaced in `(0, max_radius]` (the origin
/// is included as the first point when `include_origin`), times `n_angular`
/// equally spaced angles.
pub fn polar_grid(n_radial: usize, n_angular: usize, max_radius: f64, include_origin: bool) -> Result<Vec<Complex64>> {
    if n_radial == 0 || n_angular == 0 {
        return Err(Error::Domain("grid counts must be positive".into()));
    }
    if !(max_radius > 0.0 && max_radius < 1.0) {
        return Err(Error::Domain(format!("max radius must lie in (0, 1), got {max_radius}")));
    }
    let mut pts = Vec::with_capacity(n_radial * n_angular + 1);
    if include_origin {
        pts.push(Complex64::new(0.0, 0.0));
    }
    for i in 1..=n_radial {
        let r = max_radius * i as f64 / n_radial as f64;
        for k in 0..n_angular {
            let a = std::f64::consts::TAU * k as f64 / n_angular as f64;
            pts.push(Complex64::from_polar(r, a));
        }
    }
    Ok(pts)
}

fn check_rule(rule: &CircleRule, gamma_prime: f64) -> Result<()> {
    if rule.gamma() != gamma_prime {
        return Err(Error::Parameter(format!(
            "circle rule built for gamma = {}, transform needs {gamma_prime}",
            rule.gamma()
        )));
    }
    Ok(())
}

/// Lowest-level transform
/// `B_γ[φ](z) = √(γ/π) (1−z)^{−γ/2} ∫ (1−z e^{iθ})^{−1−γ/2} conj(φ(e^{iθ})) dσ_γ(θ)`.
pub fn bargmann(gamma: f64, phi: &dyn CircleFunction, z: Complex64, rule: &CircleRule) -> Result<Complex64> {
    check_gamma(gamma)?;
    check_in_disk(z)?;
    check_rule(rule, gamma)?;
    let one = Complex64::new(1.0, 0.0);
    let rule = rule.focused_on(z);
    let terms: Vec<Complex64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&t, &w)| {
            let b = one - z * Complex64::from_polar(1.0, t);
            (-(1.0 + 0.5 * gamma) * b.ln()).exp() * phi.eval(t).conj() * w
        })
        .collect();
    let pre = (0.5 * (gamma / std::f64::consts::PI).ln() - 0.5 * gamma * (one - z).ln()).exp();
    finite(pre * pairwise_sum(&terms))
}

/// Level-`m` transform `B_{γ,m}[φ](z)`; `rule` must be built for `γ′ = γ − 2m`.
pub fn bargmann_m(params: ModelParams, phi: &dyn CircleFunction, z: Complex64, rule: &CircleRule) -> Result<Complex64> {
    check_in_disk(z)?;
    check_rule(rule, params.gamma_prime())?;
    let (gamma, m) = (params.gamma(), f64::from(params.m()));
    let one = Complex64::new(1.0, 0.0);
    let rule = rule.focused_on(z);
    let terms = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&t, &w)| {
            let b = one - z * Complex64::from_polar(1.0, t);
            let kernel = (-(1.0 + 0.5 * gamma) * b.ln()).exp() * level_factor(params, z, t)?;
            Ok(kernel * phi.eval(t).conj() * w)
        })
        .collect::<Result<Vec<_>>>()?;
    // √(Γ(γ+1−m) / (π m! Γ(γ−2m))) (1−z)^{−γ/2}
    let ln_norm = 0.5
        * (ln_gamma(gamma + 1.0 - m) - std::f64::consts::PI.ln() - ln_gamma(m + 1.0) - ln_gamma(params.gamma_prime()));
    let pre = (ln_norm - 0.5 * gamma * (one - z).ln()).exp();
    finite(pre * pairwise_sum(&terms))
}

fn finite(v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("transform value is not finite: {v}")))
    }
}

/// `B_{γ,m}[|n; γ−2m⟩](z)` for every `n ≤ n_max`, in one pass over the rule.
/// By construction these should equal `Φ_n^{γ,m}(z)`.
pub fn transform_kets(params: ModelParams, n_max: u32, z: Complex64, rule: &CircleRule) -> Result<Vec<Complex64>> {
    check_in_disk(z)?;
    check_rule(rule, params.gamma_prime())?;
    let (gamma, m) = (params.gamma(), f64::from(params.m()));
    let one = Complex64::new(1.0, 0.0);
    let rule = rule.focused_on(z);
    let mut cols: Vec<Vec<Complex64>> = vec![Vec::with_capacity(rule.len()); n_max as usize + 1];
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let b = one - z * Complex64::from_polar(1.0, t);
        let kernel = (-(1.0 + 0.5 * gamma) * b.ln()).exp() * level_factor(params, z, t)? * w;
        for (col, k) in cols.iter_mut().zip(kets_upto(n_max, params.gamma_prime(), t)?) {
            col.push(kernel * k.conj());
        }
    }
    let ln_norm = 0.5
        * (ln_gamma(gamma + 1.0 - m) - std::f64::consts::PI.ln() - ln_gamma(m + 1.0) - ln_gamma(params.gamma_prime()));
    let pre = (ln_norm - 0.5 * gamma * (one - z).ln()).exp();
    cols.iter().map(|col| finite(pre * pairwise_sum(col))).collect()
}

/// Dispatches to [`bargmann`] for `m = 0` and [`bargmann_m`] otherwise.
pub fn transform_point(params: ModelParams, phi: &dyn CircleFunction, z: Complex64, rule: &CircleRule) -> Result<Complex64> {
    if params.m() == 0 {
        bargmann(params.gamma(), phi, z, rule)
    } else {
        bargmann_m(params, phi, z, rule)
    }
}

/// Applies the transform at every grid point, in parallel; output order
/// follows input order. The first failing point (in input order) is reported.
pub fn transform_grid(
    params: ModelParams,
    phi: &dyn CircleFunction,
    grid: &[Complex64],
    rule: &CircleRule,
) -> Result<DiskGrid> {
    let values = eval_parallel(grid, |z| transform_point(params, phi, z, rule))?;
    let provenance = if params.m() == 0 { "bargmann" } else { "bargmann_m" };
    DiskGrid::new(grid.to_vec(), values, params, provenance)
}

pub(crate) fn eval_parallel<F>(points: &[Complex64], f: F) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let results: Vec<Result<Complex64>> = points.par_iter().map(|&z| f(z)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::AtPoint { index, source: Box::new(e) }))
        .collect()
}

/// `‖B[φ]‖²` over the disk, by `d_rule`.
pub fn transform_norm_sqr(
    params: ModelParams,
    phi: &dyn CircleFunction,
    c_rule: &CircleRule,
    d_rule: &DiskRule,
) -> Result<f64> {
    if d_rule.gamma() != params.gamma() {
        return Err(Error::Parameter(format!(
            "disk rule built for gamma = {}, transform needs {}",
            d_rule.gamma(),
            params.gamma()
        )));
    }
    let values = eval_parallel(d_rule.nodes(), |z| transform_point(params, phi, z, c_rule))?;
    let terms: Vec<Complex64> = values
        .iter()
        .zip(d_rule.weights())
        .map(|(v, &w)| Complex64::new(v.norm_sqr() * w, 0.0))
        .collect();
    Ok(pairwise_sum(&terms).re)
}

/// `|‖B[φ]‖²_disk − ‖φ‖²_circle| / ‖φ‖²_circle`, both norms by quadrature.
pub fn isometry_defect(
    params: ModelParams,
    phi: &dyn CircleFunction,
    c_rule: &CircleRule,
    d_rule: &DiskRule,
) -> Result<f64> {
    check_rule(c_rule, params.gamma_prime())?;
    let circle = c_rule.norm_sqr_of(phi)?;
    if !(circle > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let disk = transform_norm_sqr(params, phi, c_rule, d_rule)?;
    Ok((disk - circle).abs() / circle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{ket, phi_bergman, phi_eigen, KetCombination};
    use crate::quadrature::DEFAULT_CIRCLE_LEVEL;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ket_zero_at_origin() {
        let g = 3.1;
        let rule = CircleRule::new(g, DEFAULT_CIRCLE_LEVEL).unwrap();
        let phi = KetCombination::single(g, 0).unwrap();
        let v = bargmann(g, &phi, c(0.0, 0.0), &rule).unwrap();
        assert!((v - (g / std::f64::consts::PI).sqrt()).norm() < 1e-13);
    }

    #[test]
    fn kets_map_to_bergman_basis() {
        let g = 4.5;
        let rule = CircleRule::new(g, DEFAULT_CIRCLE_LEVEL).unwrap();
        for n in 0..=8 {
            let phi = |t: f64| ket(n, g, t).unwrap();
            for z in [c(0.8, 0.0), c(0.1, -0.7), c(-0.5, 0.3)] {
                let b = bargmann(g, &phi, z, &rule).unwrap();
                let e = phi_bergman(n, g, z).unwrap();
                assert!((b - e).norm() < 1e-8, "n={n} z={z}: {b} vs {e}");
            }
        }
    }

    #[test]
    fn antilinear_in_input() {
        let g = 2.5;
        let rule = CircleRule::new(g, DEFAULT_CIRCLE_LEVEL).unwrap();
        let phi = KetCombination::new(g, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let z = c(0.3, 0.45);
        let b = bargmann(g, &phi, z, &rule).unwrap();
        let e = phi_bergman(0, g, z).unwrap() - c(0.0, 1.0) * phi_bergman(1, g, z).unwrap();
        assert!((b - e).norm() < 1e-8);
    }

    #[test]
    fn level_m_kets_map_to_eigen_basis() {
        let p = ModelParams::new(6.0, 2).unwrap();
        let rule = CircleRule::new(p.gamma_prime(), DEFAULT_CIRCLE_LEVEL).unwrap();
        for n in 0..=6 {
            let phi = KetCombination::single(p.gamma_prime(), n).unwrap();
            for z in [c(0.7, 0.0), c(0.0, 0.0), c(-0.2, -0.6)] {
                let b = bargmann_m(p, &phi, z, &rule).unwrap();
                let e = phi_eigen(n, p, z).unwrap();
                assert!((b - e).norm() < 1e-7, "n={n} z={z}: {b} vs {e}");
            }
        }
    }

    #[test]
    fn batched_kets_match_single_transforms() {
        let p = ModelParams::new(9.5, 3).unwrap();
        let rule = CircleRule::new(p.gamma_prime(), 7).unwrap();
        let z = c(0.35, -0.5);
        let all = transform_kets(p, 4, z, &rule).unwrap();
        for (n, v) in all.iter().enumerate() {
            let phi = KetCombination::single(p.gamma_prime(), n as u32).unwrap();
            let single = bargmann_m(p, &phi, z, &rule).unwrap();
            assert!((v - single).norm() <= 1e-13 * single.norm().max(1.0));
        }
    }

    #[test]
    fn level_zero_reduces_to_lowest() {
        let p = ModelParams::new(4.5, 0).unwrap();
        let rule = CircleRule::new(4.5, 7).unwrap();
        let phi = KetCombination::new(4.5, vec![c(0.3, -1.0), c(2.0, 0.5), c(0.0, 0.7)]).unwrap();
        for z in [c(0.0, 0.0), c(0.6, 0.2), c(-0.75, -0.1)] {
            let a = bargmann_m(p, &phi, z, &rule).unwrap();
            let b = bargmann(4.5, &phi, z, &rule).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_rules_rejected() {
        let p = ModelParams::new(6.0, 1).unwrap();
        let phi = KetCombination::single(4.0, 1).unwrap();
        let wrong = CircleRule::new(6.0, 5).unwrap();
        assert!(matches!(bargmann_m(p, &phi, c(0.1, 0.0), &wrong), Err(Error::Parameter(_))));
        assert!(bargmann(6.0, &phi, c(1.0, 0.0), &wrong).is_err());
        let zero = KetCombination::new(4.0, vec![]).unwrap();
        let ok = CircleRule::new(4.0, 5).unwrap();
        let disk = DiskRule::new(6.0, 4, 4).unwrap();
        assert_eq!(isometry_defect(p, &zero, &ok, &disk).unwrap_err(), Error::ZeroNorm);
    }

    #[test]
    fn grid_ordering_and_errors() {
        let p = ModelParams::new(6.0, 1).unwrap();
        let rule = CircleRule::new(4.0, 6).unwrap();
        let phi = KetCombination::single(4.0, 1).unwrap();
        let empty = transform_grid(p, &phi, &[], &rule).unwrap();
        assert!(empty.is_empty());
        let pts = vec![c(0.2, 0.1), c(-0.3, 0.0), c(0.0, 0.5)];
        let g = transform_grid(p, &phi, &pts, &rule).unwrap();
        for (z, v) in g.points.iter().zip(&g.values) {
            assert_eq!(*v, bargmann_m(p, &phi, *z, &rule).unwrap());
        }
        let bad = vec![c(0.2, 0.1), c(1.5, 0.0), c(2.0, 0.0)];
        match transform_grid(p, &phi, &bad, &rule) {
            Err(Error::AtPoint { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn polar_grid_shape() {
        let g = polar_grid(11, 8, 0.8, false).unwrap();
        assert_eq!(g.len(), 88);
        assert!(g.iter().all(|z| z.norm() <= 0.8 + 1e-15));
        assert_eq!(polar_grid(2, 3, 0.5, true).unwrap().len(), 7);
        assert!(polar_grid(2, 3, 1.0, true).is_err());
    }
}
