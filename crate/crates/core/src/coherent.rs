//! Reproducing kernels and coherent states `|z; γ, m⟩` on the circle.
//!
//! A coherent state is labelled by a point `z` of the disk and lives in
//! `L²(S¹, dσ_{γ−2m})`. It is defined by the superposition
//! `K(z,z)^{−1/2} Σ_n Φ_n^{γ,m}(z) |n; γ−2m⟩` and has a closed-form wave
//! function in `θ`; [`cs_series`] and [`cs_closed_m`] evaluate the two sides.

use num_complex::Complex64;

use crate::bases::{ket_sequence, one_minus_abs2, phi_eigen, ModelParams};
use crate::error::{check_gamma, check_in_disk};
use crate::quadrature::CircleFunction;
use crate::specfun::{hyp2f1_terminating, ln_gamma};
use crate::{Error, Result};

/// Hard cap on the number of series terms.
pub const SERIES_CAP: usize = 4000;
/// Consecutive negligible terms required to stop the series.
const SMALL_RUN: usize = 5;
/// Default relative tolerance for verification runs.
pub const VERIFY_TOL: f64 = 1e-12;
/// Default relative tolerance for bulk evaluation.
pub const BULK_TOL: f64 = 1e-9;

/// Diagonal of the reproducing kernel of `A_m^γ(D)`:
/// `K(z,z) = (γ−2m)/π (1−|z|²)^{−1−γ}`.
pub fn kernel_diag(params: ModelParams, z: Complex64) -> Result<f64> {
    check_in_disk(z)?;
    let w = one_minus_abs2(z);
    Ok(params.gamma_prime() / std::f64::consts::PI * (-(1.0 + params.gamma()) * w.ln()).exp())
}

/// Partial sum `Σ_{n ≤ n_max} |Φ_n^{γ,m}(z)|²`, which converges to [`kernel_diag`].
pub fn kernel_partial_sum(params: ModelParams, z: Complex64, n_max: u32) -> Result<f64> {
    let mut acc = 0.0;
    for n in 0..=n_max {
        acc += phi_eigen(n, params, z)?.norm_sqr();
    }
    Ok(acc)
}

fn debug_check_branch(base: Complex64) {
    debug_assert!(
        base.arg().abs() <= std::f64::consts::PI - 1e-9,
        "complex power base {base} is at the branch cut"
    );
}

/// Logarithm of `(1−|z|²)^{(1+γ)/2} (1−z)^{−γ/2} (1−z e^{iθ})^{−1−γ/2}`,
/// principal branches throughout.
fn ln_closed_core(gamma: f64, z: Complex64, theta: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let a = one - z;
    let b = one - z * Complex64::from_polar(1.0, theta);
    debug_check_branch(a);
    debug_check_branch(b);
    Complex64::new(0.5 * (1.0 + gamma) * one_minus_abs2(z).ln(), 0.0)
        - a.ln() * (0.5 * gamma)
        - b.ln() * (1.0 + 0.5 * gamma)
}

/// Closed-form wave function of the lowest-level coherent state,
/// `(1−|z|²)^{(1+γ)/2} (1−z)^{−γ/2} (1−z e^{iθ})^{−1−γ/2}`.
pub fn cs_closed(gamma: f64, z: Complex64, theta: f64) -> Result<Complex64> {
    check_gamma(gamma)?;
    check_in_disk(z)?;
    Ok(ln_closed_core(gamma, z, theta).exp())
}

/// The regrouped level-`m` factor
/// `((z̄−1)(1−z e^{iθ})/(1−|z|²))^m ₂F₁(−m, γ/2−m+1; 1+γ−2m; w)` with
/// `w = (1−|z|²)(1−e^{iθ}) / ((1−z̄)(1−z e^{iθ}))`. Finite at `z = 0`.
pub(crate) fn level_factor(params: ModelParams, z: Complex64, theta: f64) -> Result<Complex64> {
    let m = params.m();
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let gamma = params.gamma();
    let one = Complex64::new(1.0, 0.0);
    let e = Complex64::from_polar(1.0, theta);
    let w_abs = one_minus_abs2(z);
    let b = one - z * e;
    let prefactor = ((z.conj() - one) * b / w_abs).powu(m);
    let arg = (one - e) * w_abs / ((one - z.conj()) * b);
    let f = hyp2f1_terminating(m, gamma / 2.0 - f64::from(m) + 1.0, 1.0 + params.gamma_prime(), arg)?;
    Ok(prefactor * f)
}

/// Closed-form wave function `⟨e^{iθ} | z; γ, m⟩` of the level-`m` coherent state.
pub fn cs_closed_m(params: ModelParams, z: Complex64, theta: f64) -> Result<Complex64> {
    check_in_disk(z)?;
    let (gamma, m) = (params.gamma(), f64::from(params.m()));
    let ln_pre = 0.5 * (ln_gamma(gamma - m + 1.0) - ln_gamma(m + 1.0) - ln_gamma(params.gamma_prime() + 1.0));
    let core = (ln_closed_core(gamma, z, theta) + ln_pre).exp();
    Ok(core * level_factor(params, z, theta)?)
}

/// A truncated coherent-state series value and the number of terms it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: usize,
}

/// `K(z,z)^{−1/2} Σ_n Φ_n^{γ,m}(z) |n; γ−2m⟩(θ)`, truncated once
/// [`SMALL_RUN`] consecutive terms fall below `tol` times the partial sum.
///
/// `terms` counts up to the last term that was not negligible.
pub fn cs_series(params: ModelParams, z: Complex64, theta: f64, tol: f64) -> Result<SeriesValue> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("series tolerance must be positive, got {tol}")));
    }
    let scale = kernel_diag(params, z)?.sqrt().recip();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut run = 0;
    let mut last_significant = 0;
    for (n, ket) in ket_sequence(params.gamma_prime(), theta).take(SERIES_CAP).enumerate() {
        let term = phi_eigen(n as u32, params, z)? * ket * scale;
        partial += term;
        if partial.norm() > 0.0 && term.norm() <= tol * partial.norm() {
            run += 1;
            if run >= SMALL_RUN {
                return Ok(SeriesValue { value: partial, terms: last_significant });
            }
        } else {
            run = 0;
            last_significant = n + 1;
        }
    }
    Err(Error::NonConvergence { cap: SERIES_CAP })
}

/// The coherent state `|z; γ, m⟩` as a circle function (closed form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentState {
    params: ModelParams,
    z: Complex64,
}

impl CoherentState {
    pub fn new(params: ModelParams, z: Complex64) -> Result<Self> {
        check_in_disk(z)?;
        Ok(Self { params, z })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn wave_function(&self, theta: f64) -> Result<Complex64> {
        cs_closed_m(self.params, self.z, theta)
    }

    pub fn series(&self, theta: f64, tol: f64) -> Result<SeriesValue> {
        cs_series(self.params, self.z, theta, tol)
    }
}

impl CircleFunction for CoherentState {
    fn eval(&self, theta: f64) -> Complex64 {
        // z and params are validated at construction; the ₂F₁ parameter
        // c = 1+γ−2m is positive.
        self.wave_function(theta).expect("validated coherent state")
    }
}
