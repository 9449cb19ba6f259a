//! Quadrature for the two measures the transforms live on.
//!
//! * The circle measure `dσ_γ(θ) = 2^γ Γ²(γ/2+1)/Γ(γ+1) · sin^γ(θ/2) dθ/(2π)`
//!   on `(0, 2π)`, a probability measure. Realised by tanh-sinh rules whose
//!   weights already carry the density.
//! * The disk measure `(1−|z|²)^{γ−1} dμ(z)` of total mass `π/γ`. Realised by
//!   a Gauss–Jacobi rule in `s = |z|²` times a uniform rule in `arg z`.

use std::borrow::Cow;
use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::check_gamma;
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Default tanh-sinh level for circle rules.
pub const DEFAULT_CIRCLE_LEVEL: u32 = 7;
/// Default radial and angular sizes for disk rules.
pub const DEFAULT_DISK_SIZE: (usize, usize) = (32, 64);

/// Base tanh-sinh weights below this are dropped.
const WEIGHT_CUTOFF: f64 = 1e-18;
/// Peaks closer than this to `θ = 0` or `2π` are left to the endpoint clustering.
const SPLIT_MARGIN: f64 = 1e-3;

/// A function on the unit circle, evaluated at the angle `θ` of `e^{iθ}`.
pub trait CircleFunction: Sync {
    fn eval(&self, theta: f64) -> Complex64;
}

impl<F> CircleFunction for F
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, theta: f64) -> Complex64 {
        self(theta)
    }
}

/// Common surface of the circle and disk rules.
pub trait QuadratureRule {
    type Node: Copy;

    fn nodes(&self) -> &[Self::Node];
    fn weights(&self) -> &[f64];

    /// `Σ_k w_k f(node_k)`.
    fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(Self::Node) -> Result<Complex64>,
    {
        let terms = self
            .nodes()
            .iter()
            .zip(self.weights())
            .map(|(&x, &w)| f(x).map(|v| v * w))
            .collect::<Result<Vec<_>>>()?;
        finite(pairwise_sum(&terms))
    }

    /// `Σ_k w_k conj(f(node_k)) g(node_k)`, conjugate-linear in `f`.
    fn inner_product<F, G>(&self, f: F, g: G) -> Result<Complex64>
    where
        F: Fn(Self::Node) -> Result<Complex64>,
        G: Fn(Self::Node) -> Result<Complex64>,
    {
        self.integrate(|x| Ok(f(x)?.conj() * g(x)?))
    }

    /// `Σ_k w_k |f(node_k)|²`.
    fn norm_sqr<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(Self::Node) -> Result<Complex64>,
    {
        Ok(self.integrate(|x| Ok(Complex64::new(f(x)?.norm_sqr(), 0.0)))?.re)
    }
}

fn finite(v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("quadrature sum is not finite: {v}")))
    }
}

/// Pairwise (cascade) summation with a fixed split order.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 32 {
        values.iter().sum()
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

fn ln_sigma_constant(gamma: f64) -> f64 {
    gamma * std::f64::consts::LN_2 + 2.0 * ln_gamma(gamma / 2.0 + 1.0)
        - ln_gamma(gamma + 1.0)
        - TAU.ln()
}

/// Density of `dσ_γ` with respect to `dθ`.
pub fn sigma_density(gamma: f64, theta: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.0..=TAU).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 2π], got {theta}")));
    }
    let s = (theta.min(TAU - theta) / 2.0).sin();
    if s <= 0.0 {
        return Ok(0.0);
    }
    Ok((ln_sigma_constant(gamma) + gamma * s.ln()).exp())
}

/// Tanh-sinh rule for `dσ_γ` on `(0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleRule {
    gamma: f64,
    level: u32,
    split: Option<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CircleRule {
    /// Tanh-sinh rule with step `h = 2^{2−level}` on the whole of `(0, 2π)`.
    pub fn new(gamma: f64, level: u32) -> Result<Self> {
        Self::build(gamma, level, None)
    }

    /// Composite rule: one tanh-sinh panel on `(0, θ_s)` and one on `(θ_s, 2π)`.
    ///
    /// Panels cluster nodes double-exponentially at their ends, so this
    /// resolves integrands sharply peaked at `θ_s`.
    pub fn split_at(gamma: f64, level: u32, theta_split: f64) -> Result<Self> {
        if !(theta_split > 0.0 && theta_split < TAU) {
            return Err(Error::Domain(format!(
                "split angle must lie in (0, 2π), got {theta_split}"
            )));
        }
        Self::build(gamma, level, Some(theta_split))
    }

    fn build(gamma: f64, level: u32, split: Option<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        if level == 0 || level > 24 {
            return Err(Error::Domain(format!("circle level must be in 1..=24, got {level}")));
        }
        let h = 2f64.powi(2 - level as i32);
        let ln_c = ln_sigma_constant(gamma);
        let panels: Vec<(f64, f64)> = match split {
            None => vec![(0.0, TAU)],
            Some(s) => vec![(0.0, s), (s, TAU)],
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (a, b) in panels {
            tanh_sinh_panel(a, b, h, |theta, dist_to_seam, w| {
                // sin(θ/2) = sin(d/2) with d the distance to the seam θ ∈ {0, 2π}.
                let s = (dist_to_seam / 2.0).sin();
                let weight = if s > 0.0 { w * (ln_c + gamma * s.ln()).exp() } else { 0.0 };
                if weight > 0.0 {
                    nodes.push(theta);
                    weights.push(weight);
                }
            });
        }
        Ok(Self { gamma, level, split, nodes, weights })
    }

    /// The rule adapted to the circle kernel of the labelling point `z`:
    /// split at the angle where `|1 − z e^{iθ}|` is smallest.
    pub fn focused_on(&self, z: Complex64) -> Cow<'_, CircleRule> {
        if z.norm_sqr() == 0.0 {
            return Cow::Borrowed(self);
        }
        let peak = (-z.arg()).rem_euclid(TAU);
        if !(SPLIT_MARGIN..=TAU - SPLIT_MARGIN).contains(&peak) {
            return Cow::Borrowed(self);
        }
        if let Some(s) = self.split {
            if s == peak {
                return Cow::Borrowed(self);
            }
        }
        // gamma and level were validated when `self` was built.
        Cow::Owned(Self::build(self.gamma, self.level, Some(peak)).expect("validated rule"))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn split(&self) -> Option<f64> {
        self.split
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `⟨f, g⟩` for circle functions.
    pub fn inner(&self, f: &dyn CircleFunction, g: &dyn CircleFunction) -> Result<Complex64> {
        self.inner_product(|t| Ok(f.eval(t)), |t| Ok(g.eval(t)))
    }

    /// `‖f‖²` for a circle function.
    pub fn norm_sqr_of(&self, f: &dyn CircleFunction) -> Result<f64> {
        self.norm_sqr(|t| Ok(f.eval(t)))
    }
}

impl QuadratureRule for CircleRule {
    type Node = f64;

    fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Emits `(θ, distance of θ to the seam {0, 2π}, weight)` for a tanh-sinh
/// panel on `(a, b) ⊂ (0, 2π)`. Distances to `a` and `b` are formed from
/// `1 ± tanh(u)` directly so nodes next to the ends keep full precision.
fn tanh_sinh_panel(a: f64, b: f64, h: f64, mut emit: impl FnMut(f64, f64, f64)) {
    let half = (b - a) / 2.0;
    let mut push = |t: f64| -> bool {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let base = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if !(base > WEIGHT_CUTOFF) {
            return false;
        }
        // 1 + tanh u and 1 − tanh u without cancellation.
        let from_a = half * (u.exp() / cosh_u);
        let from_b = half * ((-u).exp() / cosh_u);
        let theta = if t <= 0.0 { a + from_a } else { b - from_b };
        if !(theta > a && theta < b) {
            // rounded onto an end of the panel
            return false;
        }
        let to_zero = if a == 0.0 { from_a } else { theta };
        let to_tau = if b == TAU { from_b } else { TAU - theta };
        emit(theta, to_zero.min(to_tau), h * half * base);
        true
    };
    // Ordered from a to b.
    let mut k_max = 0i64;
    while push_probe(k_max as f64 * h) {
        k_max += 1;
    }
    for k in (-k_max + 1)..k_max {
        push(k as f64 * h);
    }
}

fn push_probe(t: f64) -> bool {
    let u = FRAC_PI_2 * t.sinh();
    let cosh_u = u.cosh();
    FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u) > WEIGHT_CUTOFF
}

/// Gauss–Jacobi nodes and weights on `[−1, 1]` for `(1−x)^α (1+x)^β`,
/// by Golub–Welsch eigen-decomposition of the Jacobi matrix.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Domain("Gauss-Jacobi rule needs at least one node".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Jacobi weight exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jm[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let sj = 2.0 * j + ab;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let den = sj * sj * (sj + 1.0) * (sj - 1.0);
            let off = (num / den).sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = ln_mu0.exp();
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Polar tensor rule for `(1−|z|²)^{γ−1} dμ(z)` on the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskRule {
    gamma: f64,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiskRule {
    /// Gauss–Jacobi in `s = |z|²` for the weight `(1−s)^{γ−1}`, exact for
    /// integrands polynomial in `s` of degree `< 2 n_radial` and trigonometric
    /// in `arg z` of degree `< n_angular`.
    pub fn new(gamma: f64, n_radial: usize, n_angular: usize) -> Result<Self> {
        Self::with_boundary_order(gamma, 0, n_radial, n_angular)
    }

    /// Same measure, but the radial Gauss–Jacobi rule is built for the weight
    /// `(1−s)^{γ−2m−1}` and the remaining factor `(1−s)^{2m}` is folded into
    /// the weights. Integrands carrying a `(1−|z|²)^{−2m}` boundary growth
    /// (squared moduli of level-`m` eigenfunctions) are then integrated exactly.
    pub fn with_boundary_order(
        gamma: f64,
        order: u32,
        n_radial: usize,
        n_angular: usize,
    ) -> Result<Self> {
        check_gamma(gamma)?;
        if n_radial == 0 || n_angular == 0 {
            return Err(Error::Domain(format!(
                "disk rule sizes must be positive, got ({n_radial}, {n_angular})"
            )));
        }
        let shift = 2.0 * f64::from(order);
        let exponent = gamma - 1.0 - shift;
        if !(exponent > -1.0) {
            return Err(Error::Domain(format!(
                "boundary order {order} needs gamma > {shift}, got {gamma}"
            )));
        }
        let (xs, ws) = gauss_jacobi(n_radial, exponent, 0.0)?;
        // ∫₀¹ f(s)(1−s)^a ds = 2^{−a−1} ∫ f((1+x)/2)(1−x)^a dx
        let radial_scale = (-(exponent + 1.0) * std::f64::consts::LN_2).exp();
        let angular_weight = TAU / n_angular as f64;
        let mut nodes = Vec::with_capacity(n_radial * n_angular);
        let mut weights = Vec::with_capacity(n_radial * n_angular);
        for (&x, &w) in xs.iter().zip(&ws) {
            let s = (1.0 + x) / 2.0;
            let one_minus_s = (1.0 - x) / 2.0;
            let radial = w * radial_scale * one_minus_s.powf(shift) * 0.5 * angular_weight;
            let r = s.sqrt();
            for k in 0..n_angular {
                let alpha = TAU * k as f64 / n_angular as f64;
                nodes.push(Complex64::from_polar(r, alpha));
                weights.push(radial);
            }
        }
        Ok(Self { gamma, nodes, weights })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl QuadratureRule for DiskRule {
    type Node = Complex64;

    fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn one(_: f64) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn density_values() {
        assert_relative_eq!(sigma_density(2.0, PI).unwrap(), 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(
            sigma_density(4.0, PI).unwrap(),
            8.0 / (6.0 * PI),
            max_relative = 1e-14
        );
        assert_eq!(sigma_density(3.3, 0.0).unwrap(), 0.0);
        assert_eq!(sigma_density(0.2, TAU).unwrap(), 0.0);
        assert!(sigma_density(0.0, 1.0).is_err());
        assert!(sigma_density(1.0, -0.1).is_err());
    }

    #[test]
    fn circle_rule_nodes_inside() {
        for rule in [
            CircleRule::new(0.5, 7).unwrap(),
            CircleRule::split_at(0.5, 7, 2.0).unwrap(),
        ] {
            assert!(rule.nodes().iter().all(|&t| t > 0.0 && t < TAU));
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            assert!(rule.nodes().windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn circle_mass_is_one() {
        let rule = CircleRule::new(3.7, 6).unwrap();
        let mass = rule.integrate(one).unwrap();
        assert!((mass.re - 1.0).abs() < 1e-10, "{mass}");
    }

    #[test]
    fn circle_first_moment() {
        // ∫ e^{iθ} dσ_2 = −1/2 (adaptive reference at 40 digits).
        let rule = CircleRule::new(2.0, 6).unwrap();
        let v = rule.integrate(|t| Ok(Complex64::from_polar(1.0, t))).unwrap();
        assert!((v - Complex64::new(-0.5, 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn circle_rejects_bad_input() {
        assert!(CircleRule::new(-1.0, 5).is_err());
        assert!(CircleRule::new(1.0, 0).is_err());
        assert!(CircleRule::split_at(1.0, 5, 0.0).is_err());
    }

    #[test]
    fn focused_rule_splits_at_kernel_peak() {
        let rule = CircleRule::new(2.5, 6).unwrap();
        let z = Complex64::from_polar(0.9, 1.0);
        let focused = rule.focused_on(z);
        assert_relative_eq!(focused.split().unwrap(), TAU - 1.0, max_relative = 1e-15);
        assert!(matches!(rule.focused_on(Complex64::new(0.0, 0.0)), Cow::Borrowed(_)));
        assert!(matches!(rule.focused_on(Complex64::new(0.5, 0.0)), Cow::Borrowed(_)));
    }

    #[test]
    fn gauss_jacobi_moments() {
        // ∫₀¹ s^k (1−s)^α ds = B(k+1, α+1) for k < 2n, with s = (1+x)/2.
        let (n, alpha) = (6, 1.5);
        let (xs, ws) = gauss_jacobi(n, alpha, 0.0).unwrap();
        for k in 0..(2 * n) as i32 {
            let quad: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(x, w)| w * ((1.0 + x) / 2.0).powi(k))
                .sum::<f64>()
                * 2f64.powf(-alpha - 1.0);
            let kf = k as f64;
            let beta = (ln_gamma(kf + 1.0) + ln_gamma(alpha + 1.0) - ln_gamma(kf + alpha + 2.0)).exp();
            assert_relative_eq!(quad, beta, max_relative = 1e-12);
        }
        let (xs, ws) = gauss_jacobi(5, 0.0, 0.0).unwrap();
        assert_relative_eq!(ws.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(xs[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn disk_mass_and_orthogonality() {
        let rule = DiskRule::new(5.0, 16, 32).unwrap();
        let mass = rule.integrate(|_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        assert_relative_eq!(mass.re, PI / 5.0, max_relative = 1e-12);
        let ip = rule.inner_product(|z| Ok(z * z), |z| Ok(z * z * z)).unwrap();
        assert!(ip.norm() < 1e-12);
        assert!(rule.nodes().iter().all(|z| z.norm() < 1.0));
    }

    #[test]
    fn shifted_disk_rule_same_measure() {
        let plain = DiskRule::new(6.0, 12, 8).unwrap();
        let shifted = DiskRule::with_boundary_order(6.0, 2, 12, 8).unwrap();
        let f = |z: Complex64| Ok(Complex64::new(z.norm_sqr().powi(3), 0.0));
        let a = plain.integrate(f).unwrap();
        let b = shifted.integrate(f).unwrap();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
        assert!(DiskRule::with_boundary_order(4.0, 2, 12, 8).is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive_on_exact_values() {
        let v: Vec<Complex64> = (0..1000).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        assert_eq!(pairwise_sum(&v), Complex64::new(499500.0, -499500.0));
        assert_eq!(pairwise_sum(&[]), Complex64::new(0.0, 0.0));
    }
}
