//! Orthonormal families: the Bergman basis `Φ_n^γ`, the eigenspace basis
//! `Φ_n^{γ,m}` and the circular Jacobi kets `|n; γ′⟩`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, check_in_disk};
use crate::quadrature::CircleFunction;
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Field strength `γ` and Landau level index `m`, with `γ − 2m > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    gamma: f64,
    m: u32,
}

impl ModelParams {
    pub fn new(gamma: f64, m: u32) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Parameter(format!("gamma must be positive, got {gamma}")));
        }
        if !(gamma - 2.0 * f64::from(m) > 0.0) {
            return Err(Error::Parameter(format!(
                "level m = {m} requires gamma - 2m > 0, got gamma = {gamma}"
            )));
        }
        Ok(Self { gamma, m })
    }

    /// The lowest level, whose eigenspace is the Bergman space `A^γ(D)`.
    pub fn lowest(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `γ′ = γ − 2m`, the parameter of the circle measure and kets.
    pub fn gamma_prime(&self) -> f64 {
        self.gamma - 2.0 * f64::from(self.m)
    }
}

#[derive(Deserialize)]
struct RawParams {
    gamma: f64,
    m: u32,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.gamma, raw.m)
    }
}

/// `1 − |z|²` without cancellation near the boundary.
pub(crate) fn one_minus_abs2(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// `Φ_n^γ(z) = (γ Γ(γ+1+n) / (π Γ(γ+1) n!))^{1/2} z^n`.
pub fn phi_bergman(n: u32, gamma: f64, z: Complex64) -> Result<Complex64> {
    check_gamma(gamma)?;
    check_in_disk(z)?;
    Ok(z.powu(n) * bergman_norm(n, gamma))
}

pub(crate) fn bergman_norm(n: u32, gamma: f64) -> f64 {
    (gamma / std::f64::consts::PI * rising_ratio(gamma, n)).sqrt()
}

/// `(a+1)_n / n! = Π_{k=1}^{n} (a+k)/k`. A running product keeps the relative
/// error near `√n ε`, where differences of large log-gammas lose digits.
fn rising_ratio(a: f64, n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| {
        let k = f64::from(k);
        acc * ((a + k) / k)
    })
}

type CoefKey = (u64, u32, u32);

fn coef_cache() -> &'static RwLock<HashMap<CoefKey, Arc<[f64]>>> {
    static CACHE: OnceLock<RwLock<HashMap<CoefKey, Arc<[f64]>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients `c_j`, `j = 0..=min(m, n)`, of
/// `Φ_n^{γ,m}(z) = (1−|z|²)^{−m} Σ_j c_j (1−|z|²)^j z^{n−j} z̄^{m−j}`.
///
/// `c_j = (−1)^j N_n C(m, j) C(n+γ′, n−j)` with `N_n` the normalisation of the
/// basis element; cached per `(γ, m, n)`.
fn eigen_coefficients(n: u32, params: ModelParams) -> Arc<[f64]> {
    let key = (params.gamma.to_bits(), params.m, n);
    if let Some(c) = coef_cache().read().expect("cache poisoned").get(&key) {
        return Arc::clone(c);
    }
    let (gamma, m) = (params.gamma, params.m);
    let gp = params.gamma_prime();
    let mf = f64::from(m);
    // c_0 = √(γ′ Γ(γ−m+1) / (π m! Γ(γ′+1))) · √((γ′+1)_n / n!)
    let ln_front = gp.ln() - std::f64::consts::PI.ln() + ln_gamma(gamma - mf + 1.0)
        - ln_gamma(mf + 1.0)
        - ln_gamma(gp + 1.0);
    let mut c = (0.5 * ln_front).exp() * rising_ratio(gp, n).sqrt();
    let mut coefs = Vec::with_capacity(m.min(n) as usize + 1);
    for j in 0..=m.min(n) {
        if j > 0 {
            // c_j / c_{j−1} = −(m−j+1)/j · (n−j+1)/(γ′+j)
            let jf = f64::from(j);
            c *= -(mf - jf + 1.0) / jf * (f64::from(n) - jf + 1.0) / (gp + jf);
        }
        coefs.push(c);
    }
    let coefs: Arc<[f64]> = coefs.into();
    coef_cache()
        .write()
        .expect("cache poisoned")
        .entry(key)
        .or_insert(coefs)
        .clone()
}

/// Eigenspace basis element `Φ_n^{γ,m}(z)` of level `m`.
///
/// Evaluated as a finite polynomial in `(z, z̄)` times `(1−|z|²)^{−m}`; the
/// apparent pole `z̄^{m−n}` of the Jacobi-polynomial form cancels term by term,
/// so the value is finite everywhere in the disk including the origin.
pub fn phi_eigen(n: u32, params: ModelParams, z: Complex64) -> Result<Complex64> {
    check_in_disk(z)?;
    let m = params.m;
    let w = one_minus_abs2(z);
    let zc = z.conj();
    let coefs = eigen_coefficients(n, params);
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &c) in coefs.iter().enumerate() {
        let j = j as u32;
        sum += z.powu(n - j) * zc.powu(m - j) * (c * w.powi(j as i32));
    }
    Ok(sum * w.powi(-(m as i32)))
}

/// Circular Jacobi polynomial `g_n^{γ′}(e^{iθ}) = ((γ′+1)_n/n!) ₂F₁(−n, γ′/2+1; γ′+1; 1−e^{iθ})`.
///
/// Evaluated through the Szegő recursion of the monic orthogonal polynomials
/// of `dσ_{γ′}`, whose Verblunsky coefficients are `−λ/(λ+k+1)`, `λ = γ′/2`.
/// Unlike the hypergeometric sum this is stable for large `n`.
pub fn circular_jacobi(n: u32, gamma_prime: f64, theta: f64) -> Result<Complex64> {
    check_gamma(gamma_prime)?;
    let lambda = gamma_prime / 2.0;
    let mut lead = 1.0;
    for k in 0..n {
        let kf = f64::from(k);
        lead *= (lambda + 1.0 + kf) / (kf + 1.0);
    }
    Ok(monic_szego(n, lambda, theta).0 * lead)
}

/// Normalised ket `|n; γ′⟩ = √(n!/(γ′+1)_n) g_n^{γ′}`.
pub fn ket(n: u32, gamma_prime: f64, theta: f64) -> Result<Complex64> {
    check_gamma(gamma_prime)?;
    Ok(monic_szego(n, gamma_prime / 2.0, theta).1)
}

/// Returns `(Φ_n(e^{iθ}), Φ_n(e^{iθ}) / ‖Φ_n‖)` for the monic polynomial.
fn monic_szego(n: u32, lambda: f64, theta: f64) -> (Complex64, Complex64) {
    let mut it = Szego::new(lambda, theta);
    for _ in 0..n {
        it.step();
    }
    (it.p, it.p * it.scale)
}

/// Szegő recursion `Φ_{k+1} = zΦ_k − ᾱ_k Φ_k*`, `Φ*_{k+1} = Φ_k* − α_k zΦ_k`
/// on the unit circle, tracking `1/‖Φ_k‖`.
struct Szego {
    lambda: f64,
    z: Complex64,
    k: u32,
    p: Complex64,
    p_rev: Complex64,
    scale: f64,
}

impl Szego {
    fn new(lambda: f64, theta: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { lambda, z: Complex64::from_polar(1.0, theta), k: 0, p: one, p_rev: one, scale: 1.0 }
    }

    fn step(&mut self) {
        let kf = f64::from(self.k);
        let a = self.lambda / (self.lambda + kf + 1.0);
        let zp = self.z * self.p;
        self.p = zp + self.p_rev * a;
        self.p_rev += zp * a;
        // 1/√(1 − α_k²)
        self.scale *=
            (self.lambda + kf + 1.0) / ((kf + 1.0) * (2.0 * self.lambda + kf + 1.0)).sqrt();
        self.k += 1;
    }
}

/// The kets `|0; γ′⟩, |1; γ′⟩, …` at one angle, lazily.
pub(crate) fn ket_sequence(gamma_prime: f64, theta: f64) -> impl Iterator<Item = Complex64> {
    let mut it = Szego::new(gamma_prime / 2.0, theta);
    std::iter::from_fn(move || {
        let v = it.p * it.scale;
        it.step();
        Some(v)
    })
}

/// All kets `|0; γ′⟩ … |n_max; γ′⟩` at one angle, in `O(n_max)`.
pub fn kets_upto(n_max: u32, gamma_prime: f64, theta: f64) -> Result<Vec<Complex64>> {
    check_gamma(gamma_prime)?;
    let mut it = Szego::new(gamma_prime / 2.0, theta);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(it.p);
    for _ in 0..n_max {
        it.step();
        out.push(it.p * it.scale);
    }
    Ok(out)
}

/// A finite combination `Σ_n c_n |n; γ′⟩` as a circle function.
#[derive(Debug, Clone, PartialEq)]
pub struct KetCombination {
    gamma_prime: f64,
    coeffs: Vec<Complex64>,
}

impl KetCombination {
    pub fn new(gamma_prime: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        check_gamma(gamma_prime)?;
        Ok(Self { gamma_prime, coeffs })
    }

    /// The single ket `|n; γ′⟩`.
    pub fn single(gamma_prime: f64, n: u32) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n as usize + 1];
        coeffs[n as usize] = Complex64::new(1.0, 0.0);
        Self::new(gamma_prime, coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    /// `‖φ‖² = Σ |c_n|²` by orthonormality of the kets.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

impl CircleFunction for KetCombination {
    fn eval(&self, theta: f64) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let n_max = self.coeffs.len() as u32 - 1;
        let kets = kets_upto(n_max, self.gamma_prime, theta).expect("gamma_prime validated");
        kets.iter().zip(&self.coeffs).map(|(k, c)| k * c).sum()
    }
}
