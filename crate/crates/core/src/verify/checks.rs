//! Individual identity measurements. Each returns the largest defect seen
//! over its sample set; tolerances are attached by [`super::run_suite`].

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{apply_operator_fd, eigen_defect, landau_level, Measurement};
use crate::bases::{kets_upto, phi_bergman, phi_eigen, KetCombination, ModelParams};
use crate::coherent::{cs_closed, cs_closed_m, cs_series, kernel_diag, kernel_partial_sum, CoherentState};
use crate::quadrature::{pairwise_sum, CircleRule, DiskRule, QuadratureRule};
use crate::specfun::{binomial, hyp2f1_terminating, jacobi_p, log_gamma, pochhammer};
use crate::transforms::{bargmann, bargmann_m, isometry_defect, transform_kets, transform_point};
use crate::Result;

const GOLDEN_ANGLE: f64 = 2.399963229728653;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `count` points with radii evenly spread over `[r_min, r_max]` at golden-angle
/// increments.
fn spiral(count: usize, r_min: f64, r_max: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
            Complex64::from_polar(r_min + (r_max - r_min) * t, 0.3 + GOLDEN_ANGLE * k as f64)
        })
        .collect()
}

/// Disk points and circle angles shared by the coherent-state checks.
fn cs_samples() -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    for r in [0.1, 0.4, 0.7] {
        for k in 0..3 {
            let z = Complex64::from_polar(r, TAU * k as f64 / 3.0);
            for theta in [0.5, PI, 5.0] {
                out.push((z, theta));
            }
        }
    }
    out
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn random_combination(rng: &mut ChaCha8Rng, gamma_prime: f64, degree: usize) -> Result<KetCombination> {
    let coeffs = (0..=degree).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    KetCombination::new(gamma_prime, coeffs)
}

/// Largest entry of `|G − target|` for a Gram matrix built from columns of
/// basis values at quadrature nodes.
fn gram_defect(columns: &[Vec<Complex64>], weights: &[f64], target: impl Fn(usize, usize) -> Complex64) -> Measurement {
    let size = columns.len();
    let mut out = Measurement::new(0.0, 0).with("basis_size", size as f64);
    for i in 0..size {
        for j in i..size {
            let terms: Vec<Complex64> =
                columns[i].iter().zip(&columns[j]).zip(weights).map(|((a, b), &w)| a.conj() * b * w).collect();
            out.absorb((pairwise_sum(&terms) - target(i, j)).norm());
        }
    }
    out
}

fn delta(i: usize, j: usize) -> Complex64 {
    c(if i == j { 1.0 } else { 0.0 }, 0.0)
}

/// Columns `n = 0..size` of `f(n, node)` over the nodes of `rule`.
fn columns<N: Copy + Sync>(
    nodes: &[N],
    size: usize,
    f: impl Fn(N) -> Result<Vec<Complex64>> + Sync,
) -> Result<Vec<Vec<Complex64>>> {
    let rows = nodes.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    Ok((0..size).map(|n| rows.iter().map(|r| r[n]).collect()).collect())
}

pub fn circle_mass(gamma: f64, level: u32) -> Result<Measurement> {
    let rule = CircleRule::new(gamma, level)?;
    let mass: f64 = rule.weights().iter().sum();
    Ok(Measurement::new((mass - 1.0).abs(), rule.len()).with("level", f64::from(level)).with("gamma", gamma))
}

/// Relative error of the disk mass against `π/γ`.
pub fn disk_mass(gamma: f64, (nr, na): (usize, usize)) -> Result<Measurement> {
    let rule = DiskRule::new(gamma, nr, na)?;
    let mass: f64 = rule.weights().iter().sum();
    let exact = PI / gamma;
    Ok(Measurement::new((mass - exact).abs() / exact, rule.len())
        .with("n_radial", nr as f64)
        .with("n_angular", na as f64))
}

pub fn gram_bergman(gamma: f64, n_max: usize, (nr, na): (usize, usize)) -> Result<Measurement> {
    let rule = DiskRule::new(gamma, nr, na)?;
    let cols = columns(rule.nodes(), n_max + 1, |z| {
        (0..=n_max as u32).map(|n| phi_bergman(n, gamma, z)).collect()
    })?;
    Ok(gram_defect(&cols, rule.weights(), delta))
}

/// `Φ_n^{γ,0} = Φ_n^γ` on a grid reaching `|z| = 0.95`, for `n ≤ 15`.
pub fn eigen_m0_reduction(gamma: f64) -> Result<Measurement> {
    let params = ModelParams::lowest(gamma)?;
    let mut out = Measurement::new(0.0, 0);
    for z in spiral(100, 0.0, 0.95) {
        for n in 0..=15 {
            let a = phi_eigen(n, params, z)?;
            let b = phi_bergman(n, gamma, z)?;
            out.absorb(rel(a, b));
        }
    }
    Ok(out)
}

pub fn gram_eigen(params: ModelParams, n_max: usize, (nr, na): (usize, usize)) -> Result<Measurement> {
    let rule = DiskRule::with_boundary_order(params.gamma(), params.m(), nr, na)?;
    let cols = columns(rule.nodes(), n_max + 1, |z| {
        (0..=n_max as u32).map(|n| phi_eigen(n, params, z)).collect()
    })?;
    Ok(gram_defect(&cols, rule.weights(), delta).with("boundary_order", f64::from(params.m())))
}

/// `|Φ_n(0) − Φ_n(ε e^{ia})|` for tiny `ε`: the apparent pole at the origin
/// must cancel.
pub fn eigen_origin_continuity(params: ModelParams, n_max: u32) -> Result<Measurement> {
    const EPS: f64 = 1e-9;
    let mut out = Measurement::new(0.0, 0).with("epsilon", EPS);
    for n in 0..=n_max {
        let at_zero = phi_eigen(n, params, c(0.0, 0.0))?;
        for k in 0..8 {
            let near = phi_eigen(n, params, Complex64::from_polar(EPS, TAU * k as f64 / 8.0))?;
            out.absorb((at_zero - near).norm() / at_zero.norm().max(1.0));
        }
    }
    Ok(out)
}

pub fn gram_kets(gamma_prime: f64, n_max: usize, level: u32) -> Result<Measurement> {
    let rule = CircleRule::new(gamma_prime, level)?;
    let cols = columns(rule.nodes(), n_max + 1, |t| kets_upto(n_max as u32, gamma_prime, t))?;
    Ok(gram_defect(&cols, rule.weights(), delta).with("level", f64::from(level)))
}

/// Relative defect of `Σ_{n≤N} |Φ_n(z)|²` against the closed-form kernel.
pub fn kernel_consistency(params: ModelParams, n_max: u32) -> Result<Measurement> {
    let mut out = Measurement::new(0.0, 0).with("n_max", f64::from(n_max));
    for r in [0.0, 0.3, 0.5, 0.7] {
        for k in 0..3 {
            let z = Complex64::from_polar(r, 0.4 + TAU * k as f64 / 3.0);
            let exact = kernel_diag(params, z)?;
            let partial = kernel_partial_sum(params, z, n_max)?;
            out.absorb((partial - exact).abs() / exact);
        }
    }
    Ok(out)
}

pub fn series_closed_agreement(params: ModelParams, tol: f64) -> Result<Measurement> {
    let mut out = Measurement::new(0.0, 0).with("series_tol", tol);
    let mut most_terms = 0usize;
    for (z, theta) in cs_samples() {
        let series = cs_series(params, z, theta, tol)?;
        most_terms = most_terms.max(series.terms);
        out.absorb(rel(series.value, cs_closed_m(params, z, theta)?));
    }
    Ok(out.with("max_terms", most_terms as f64))
}

/// `|‖ |z; γ, m⟩ ‖² − 1|` by circle quadrature focused on each `z`.
pub fn coherent_normalization(params: ModelParams, level: u32) -> Result<Measurement> {
    let rule = CircleRule::new(params.gamma_prime(), level)?;
    let mut out = Measurement::new(0.0, 0).with("level", f64::from(level));
    for z in spiral(12, 0.0, 0.9) {
        let cs = CoherentState::new(params, z)?;
        out.absorb((rule.focused_on(z).norm_sqr_of(&cs)? - 1.0).abs());
    }
    Ok(out)
}

pub fn coherent_m0_collapse(gamma: f64) -> Result<Measurement> {
    let params = ModelParams::lowest(gamma)?;
    let mut out = Measurement::new(0.0, 0);
    for (z, theta) in cs_samples() {
        out.absorb(rel(cs_closed_m(params, z, theta)?, cs_closed(gamma, z, theta)?));
    }
    Ok(out)
}

/// `B_{γ,0}` against `B_γ` on a random ket combination.
pub fn transform_m0_reduction(gamma: f64, level: u32, seed: u64) -> Result<Measurement> {
    let params = ModelParams::lowest(gamma)?;
    let rule = CircleRule::new(gamma, level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = random_combination(&mut rng, gamma, 6)?;
    let mut out = Measurement::new(0.0, 0);
    for z in spiral(12, 0.0, 0.9) {
        let a = bargmann_m(params, &phi, z, &rule)?;
        let b = bargmann(gamma, &phi, z, &rule)?;
        out.absorb((a - b).norm() / b.norm().max(1.0));
    }
    Ok(out)
}

/// `|B_{γ,m}[|n; γ−2m⟩](z) − Φ_n^{γ,m}(z)|` for `n ≤ n_max`, `|z| ≤ max_radius`.
pub fn transform_basis_mapping(params: ModelParams, n_max: u32, max_radius: f64, level: u32) -> Result<Measurement> {
    let rule = CircleRule::new(params.gamma_prime(), level)?;
    let points = crate::transforms::polar_grid(4, 6, max_radius, true)?;
    let rows = points
        .par_iter()
        .map(|&z| {
            let mapped = transform_kets(params, n_max, z, &rule)?;
            mapped
                .iter()
                .enumerate()
                .map(|(n, v)| Ok((v - phi_eigen(n as u32, params, z)?).norm()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Measurement::new(0.0, 0).with("max_radius", max_radius).with("n_max", f64::from(n_max));
    rows.into_iter().flatten().for_each(|d| out.absorb(d));
    Ok(out)
}

/// `B[αφ + βψ] = ᾱ B[φ] + β̄ B[ψ]`, relative to `|α||Bφ| + |β||Bψ|`.
pub fn transform_antilinearity(params: ModelParams, level: u32, seed: u64) -> Result<Measurement> {
    let gp = params.gamma_prime();
    let rule = CircleRule::new(gp, level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let phi = random_combination(&mut rng, gp, 5)?;
    let psi = random_combination(&mut rng, gp, 5)?;
    let alpha = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let beta = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let mix = |t: f64| alpha * crate::quadrature::CircleFunction::eval(&phi, t)
        + beta * crate::quadrature::CircleFunction::eval(&psi, t);
    let mut out = Measurement::new(0.0, 0);
    for z in spiral(10, 0.0, 0.85) {
        let bp = transform_point(params, &phi, z, &rule)?;
        let bq = transform_point(params, &psi, z, &rule)?;
        let bm = transform_point(params, &mix, z, &rule)?;
        let scale = alpha.norm() * bp.norm() + beta.norm() * bq.norm();
        out.absorb((bm - (alpha.conj() * bp + beta.conj() * bq)).norm() / scale);
    }
    Ok(out)
}

/// `‖B[φ]‖_disk = ‖φ‖_circle` on `|0⟩`, `|3⟩ − 2|1⟩` and one random combination
/// of each degree `1..=max_degree`.
pub fn transform_isometry(
    params: ModelParams,
    max_degree: usize,
    level: u32,
    (nr, na): (usize, usize),
    seed: u64,
) -> Result<Measurement> {
    let gp = params.gamma_prime();
    let c_rule = CircleRule::new(gp, level)?;
    let d_rule = DiskRule::with_boundary_order(params.gamma(), params.m(), nr, na)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut inputs = vec![
        KetCombination::single(gp, 0)?,
        KetCombination::new(gp, vec![c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])?,
    ];
    for degree in 1..=max_degree {
        inputs.push(random_combination(&mut rng, gp, degree)?);
    }
    let mut out = Measurement::new(0.0, 0).with("max_degree", max_degree as f64);
    for phi in &inputs {
        out.absorb(isometry_defect(params, phi, &c_rule, &d_rule)?);
    }
    Ok(out)
}

pub fn eigen_equation_basis(params: ModelParams, n_max: u32, h: f64) -> Result<Measurement> {
    let mut out = Measurement::new(0.0, 0).with("h", h).with("eigenvalue", landau_level(params));
    for z in spiral(12, 0.15, 0.6) {
        for n in 0..=n_max {
            out.absorb(eigen_defect(params, n, z, h)?);
        }
    }
    Ok(out)
}

fn transform_eigen_max(params: ModelParams, h: f64, rule: &CircleRule) -> Result<f64> {
    let phi = KetCombination::single(params.gamma_prime(), 1)?;
    let f = |w| transform_point(params, &phi, w, rule);
    let eps = landau_level(params);
    let defects = spiral(6, 0.15, 0.6)
        .into_par_iter()
        .map(|z| {
            let value = f(z)?;
            let applied = apply_operator_fd(params.gamma(), f, z, h)?;
            Ok((applied - value * eps).norm() / value.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Eigen-equation for `B_{γ,m}[|1; γ−2m⟩]`, applied by finite differences.
pub fn eigen_equation_transform(params: ModelParams, h: f64, level: u32) -> Result<Measurement> {
    let rule = CircleRule::new(params.gamma_prime(), level)?;
    let d = transform_eigen_max(params, h, &rule)?;
    Ok(Measurement::new(d, 6).with("h", h).with("eigenvalue", landau_level(params)))
}

fn order_measurement(coarse: f64, fine: f64, h: f64) -> Measurement {
    let order = (coarse / fine).log2();
    Measurement::new((order - 2.0).abs(), 2)
        .with("h", h)
        .with("order", order)
        .with("defect_h", coarse)
        .with("defect_half_h", fine)
}

/// Observed convergence order of the eigen-equation defect under `h → h/2`.
pub fn fd_order_basis(params: ModelParams, n_max: u32, h: f64) -> Result<Measurement> {
    let coarse = eigen_equation_basis(params, n_max, h)?.max_defect;
    let fine = eigen_equation_basis(params, n_max, h / 2.0)?.max_defect;
    Ok(order_measurement(coarse, fine, h))
}

pub fn fd_order_transform(params: ModelParams, h: f64, level: u32) -> Result<Measurement> {
    let rule = CircleRule::new(params.gamma_prime(), level)?;
    let coarse = transform_eigen_max(params, h, &rule)?;
    let fine = transform_eigen_max(params, h / 2.0, &rule)?;
    Ok(order_measurement(coarse, fine, h))
}

/// `∫ ⟨φ|z⟩⟨z|ψ⟩ K(z,z) dμ_γ(z) = ⟨φ|ψ⟩` on the first kets, with the
/// overlaps `⟨φ|z⟩` computed on the circle.
pub fn resolution_of_identity(
    params: ModelParams,
    n_max: u32,
    level: u32,
    (nr, na): (usize, usize),
) -> Result<Measurement> {
    let gp = params.gamma_prime();
    let c_rule = CircleRule::new(gp, level)?;
    let d_rule = DiskRule::with_boundary_order(params.gamma(), params.m(), nr, na)?;
    let size = n_max as usize + 1;
    // column n holds √K(z) ⟨ket_n|z⟩ at each disk node
    let cols = columns(d_rule.nodes(), size, |z| {
        let rule = c_rule.focused_on(z);
        let mut sums = vec![Vec::with_capacity(rule.len()); size];
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let cs = cs_closed_m(params, z, t)?;
            for (s, k) in sums.iter_mut().zip(kets_upto(n_max, gp, t)?) {
                s.push(k.conj() * cs * w);
            }
        }
        let root_k = kernel_diag(params, z)?.sqrt();
        Ok(sums.iter().map(|s| pairwise_sum(s).conj() * root_k).collect())
    })?;
    Ok(gram_defect(&cols, d_rule.weights(), delta).with("n_max", f64::from(n_max)))
}

/// `⟨B φ_i | B φ_j⟩_disk = conj(⟨φ_i | φ_j⟩_circle)` on the first kets.
pub fn overlap_identity(
    params: ModelParams,
    n_max: u32,
    level: u32,
    (nr, na): (usize, usize),
) -> Result<Measurement> {
    let gp = params.gamma_prime();
    let c_rule = CircleRule::new(gp, level)?;
    let d_rule = DiskRule::with_boundary_order(params.gamma(), params.m(), nr, na)?;
    let size = n_max as usize + 1;
    let circle_cols = columns(c_rule.nodes(), size, |t| kets_upto(n_max, gp, t))?;
    let mut circle_gram = vec![vec![c(0.0, 0.0); size]; size];
    for (i, row) in circle_gram.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let terms: Vec<Complex64> = circle_cols[i]
                .iter()
                .zip(&circle_cols[j])
                .zip(c_rule.weights())
                .map(|((a, b), &w)| a.conj() * b * w)
                .collect();
            *entry = pairwise_sum(&terms);
        }
    }
    let disk_cols = columns(d_rule.nodes(), size, |z| transform_kets(params, n_max, z, &c_rule))?;
    Ok(gram_defect(&disk_cols, d_rule.weights(), |i, j| circle_gram[i][j].conj()).with("n_max", f64::from(n_max)))
}

/// `P_n^{(α, β−n)}(u) = C(n+α, n) ((1+u)/2)^n ₂F₁(−n, −β; α+1; (u−1)/(u+1))`
/// at `u = 2e^{−iθ} − 1`.
pub fn jacobi_hypergeometric_form(draws: usize, seed: u64) -> Result<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(10));
    let mut out = Measurement::new(0.0, 0);
    for _ in 0..draws {
        let n = rng.gen_range(0..=10u32);
        let alpha = rng.gen_range(0.01..10.0);
        let beta = rng.gen_range(-10.0..10.0);
        let theta: f64 = rng.gen_range(0.05..TAU - 0.05);
        let u = Complex64::from_polar(2.0, -theta) - 1.0;
        let lhs = jacobi_p(n, alpha, beta - f64::from(n), u);
        let rhs = ((u + 1.0) * 0.5).powu(n)
            * binomial(f64::from(n) + alpha, n)
            * hyp2f1_terminating(n, -beta, alpha + 1.0, (u - 1.0) / (u + 1.0))?;
        out.absorb(rel(lhs, rhs));
    }
    Ok(out)
}

/// `P_n^{(m−n, γ′)}(1−2r²) = (−1)^n P_n^{(γ′, m−n)}(2r²−1)`.
pub fn jacobi_parity(draws: usize, seed: u64) -> Result<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(11));
    let mut out = Measurement::new(0.0, 0);
    for _ in 0..draws {
        let (n, gp, m, r) = radial_draw(&mut rng);
        let x = 2.0 * r * r - 1.0;
        let lhs = jacobi_p(n, m - f64::from(n), gp, c(-x, 0.0));
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = jacobi_p(n, gp, m - f64::from(n), c(x, 0.0)) * sign;
        out.absorb(rel(lhs, rhs));
    }
    Ok(out)
}

/// `P_n^{(γ′, m−n)}(2r²−1) = (γ′+1)_n / n! · r^{2n} ₂F₁(−n, −m; γ′+1; (r²−1)/r²)`.
pub fn jacobi_radial_representation(draws: usize, seed: u64) -> Result<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(12));
    let mut out = Measurement::new(0.0, 0);
    for _ in 0..draws {
        let (n, gp, m, r) = radial_draw(&mut rng);
        let s = r * r;
        let lhs = jacobi_p(n, gp, m - f64::from(n), c(2.0 * s - 1.0, 0.0));
        let rhs = hyp2f1_terminating(n, -m, gp + 1.0, c((s - 1.0) / s, 0.0))?
            * (pochhammer(gp + 1.0, n) / pochhammer(1.0, n) * s.powi(n as i32));
        out.absorb(rel(lhs, rhs));
    }
    Ok(out)
}

/// `(n, γ′, m, r)` with `γ′ = γ − 2m > 0`.
fn radial_draw(rng: &mut ChaCha8Rng) -> (u32, f64, f64, f64) {
    let n = rng.gen_range(0..=10u32);
    let gamma: f64 = rng.gen_range(0.5..12.0);
    let m_max = ((gamma / 2.0).ceil() as u32).saturating_sub(1);
    let m = rng.gen_range(0..=m_max);
    let gp = gamma - 2.0 * f64::from(m);
    (n, gp, f64::from(m), rng.gen_range(0.1..0.99))
}

/// `(a)_n = Γ(a+n)/Γ(a)`.
pub fn pochhammer_gamma_ratio(draws: usize, seed: u64) -> Result<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(13));
    let mut out = Measurement::new(0.0, 0);
    for _ in 0..draws {
        let a = rng.gen_range(0.01..20.0);
        let n = rng.gen_range(0..=30u32);
        let direct = pochhammer(a, n);
        let ratio = (log_gamma(a + f64::from(n))? - log_gamma(a)?).exp();
        out.absorb((direct - ratio).abs() / direct);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_covers_range() {
        let pts = spiral(12, 0.15, 0.6);
        assert_eq!(pts.len(), 12);
        assert!((pts[0].norm() - 0.15).abs() < 1e-15);
        assert!((pts[11].norm() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn gram_defect_of_orthonormal_columns() {
        let cols = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]];
        let m = gram_defect(&cols, &[1.0, 1.0], delta);
        assert_eq!(m.max_defect, 0.0);
        assert_eq!(m.n_samples, 3);
    }

    #[test]
    fn radial_draws_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (_, gp, _, r) = radial_draw(&mut rng);
            assert!(gp > 0.0 && r > 0.0 && r < 1.0);
        }
    }
}
