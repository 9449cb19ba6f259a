//! Special functions: log-gamma, Pochhammer symbols, terminating Gauss
//! hypergeometric sums and Jacobi polynomials at complex argument.
//!
//! Every routine here is a pure function. Jacobi polynomials are evaluated by
//! their explicit double-binomial sum rather than by a recurrence in the
//! degree, because the eigenspace basis uses a degree-dependent parameter
//! `α = m − n` for which fixed-parameter recurrences do not apply.

use num_complex::Complex64;

use crate::{Error, Result};

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `ln Γ(x)` for arguments the caller has already validated.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// Rising factorial `a (a+1) ··· (a+n−1)`, with `(a)_0 = 1`.
///
/// A zero factor is hit exactly when `a` is a non-positive integer with
/// `n > −a`, in which case the product is exactly zero.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for k in 0..n {
        let factor = a + f64::from(k);
        if factor == 0.0 {
            return 0.0;
        }
        acc *= factor;
    }
    acc
}

/// Generalised binomial coefficient `C(a, k) = (a−k+1)_k / k!` for real `a`.
pub fn binomial(a: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for j in 1..=k {
        let num = a - f64::from(k) + f64::from(j);
        if num == 0.0 {
            return 0.0;
        }
        acc *= num / f64::from(j);
    }
    acc
}

/// Terminating Gauss hypergeometric sum `₂F₁(−n, b; c; x)`.
///
/// Summed forward with a running ratio of successive terms. Fails when one of
/// `(c)_1, …, (c)_n` vanishes, i.e. for `c ∈ {0, −1, …, −(n−1)}`.
pub fn hyp2f1_terminating(n: u32, b: f64, c: f64, x: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = f64::from(k);
        let denom = (c + kf) * (kf + 1.0);
        if c + kf == 0.0 {
            return Err(Error::Parameter(format!(
                "2F1(-{n}, {b}; {c}; x): (c)_k vanishes at k = {}",
                k + 1
            )));
        }
        term *= x * ((kf - f64::from(n)) * (b + kf) / denom);
        sum += term;
    }
    Ok(sum)
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` at complex `x`.
///
/// Uses the finite sum
/// `Σ_k C(n+α, n−k) C(n+β, k) ((x−1)/2)^k ((x+1)/2)^{n−k}`
/// with generalised binomials, so negative-integer values of `n+α` or `n+β`
/// make the corresponding terms vanish exactly.
pub fn jacobi_p(n: u32, alpha: f64, beta: f64, x: Complex64) -> Complex64 {
    let nf = f64::from(n);
    let lower = (x - 1.0) * 0.5;
    let upper = (x + 1.0) * 0.5;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let c = binomial(nf + alpha, n - k) * binomial(nf + beta, k);
        if c == 0.0 {
            continue;
        }
        sum += lower.powu(k) * upper.powu(n - k) * c;
    }
    sum
}
