//! Identity-certification harness.
//!
//! Every identity the transforms rest on is checked numerically here and
//! reported as a [`VerificationReport`]. The individual measurements live in
//! [`checks`]; [`run_suite`] runs them all for a [`SuiteConfig`] and never
//! stops at the first failure.

pub mod checks;

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::{one_minus_abs2, phi_eigen, ModelParams};
use crate::quadrature::{DEFAULT_CIRCLE_LEVEL, DEFAULT_DISK_SIZE};
use crate::{Error, Result};

/// Hyperbolic Landau level `ε_m = 4m(γ − m)`.
pub fn landau_level(params: ModelParams) -> f64 {
    let m = f64::from(params.m());
    4.0 * m * (params.gamma() - m)
}

/// The magnetic Laplacian
/// `Δ_γ F = −4(1−|z|²)[(1−|z|²) ∂²F/∂z∂z̄ − (γ+1) z̄ ∂F/∂z̄]`
/// applied by second-order central differences with step `h`.
pub fn apply_operator_fd<F>(gamma: f64, f: F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let reach = z.norm() + 2.0 * h;
    if !(reach < 1.0) {
        return Err(Error::StencilOutOfDomain(reach));
    }
    let centre = f(z)?;
    let east = f(z + h)?;
    let west = f(z - h)?;
    let north = f(z + Complex64::new(0.0, h))?;
    let south = f(z - Complex64::new(0.0, h))?;
    let laplacian = (east + west + north + south - centre * 4.0) / (h * h);
    let dx = (east - west) / (2.0 * h);
    let dy = (north - south) / (2.0 * h);
    let d_zbar = (dx + Complex64::i() * dy) * 0.5;
    let d_z_zbar = laplacian * 0.25;
    let w = one_minus_abs2(z);
    Ok(-(d_z_zbar * w - z.conj() * d_zbar * (gamma + 1.0)) * (4.0 * w))
}

/// Smallest basis value accepted by [`eigen_defect`].
const MIN_BASIS_VALUE: f64 = 1e-10;

/// `|Δ_γ Φ_n^{γ,m}(z) − ε_m Φ_n^{γ,m}(z)| / |Φ_n^{γ,m}(z)|`.
pub fn eigen_defect(params: ModelParams, n: u32, z: Complex64, h: f64) -> Result<f64> {
    let value = phi_eigen(n, params, z)?;
    if value.norm() < MIN_BASIS_VALUE {
        return Err(Error::NearZeroValue(z));
    }
    let applied = apply_operator_fd(params.gamma(), |w| phi_eigen(n, params, w), z, h)?;
    Ok((applied - value * landau_level(params)).norm() / value.norm())
}

/// One certified identity: what was measured, against which tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_name: String,
    pub params: Option<ModelParams>,
    pub settings: BTreeMap<String, f64>,
    pub max_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub n_samples: usize,
    pub runtime_ms: u64,
    /// Set when the check could not be carried out; not serialized.
    #[serde(skip)]
    pub error: Option<String>,
}

/// Settings shared by every check in a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub param_sets: Vec<ModelParams>,
    /// `γ` values for the measure-mass checks.
    pub mass_gammas: Vec<f64>,
    pub circle_level: u32,
    pub disk_size: (usize, usize),
    pub fd_step: f64,
    pub series_tol: f64,
    pub jacobi_draws: usize,
    pub seed: u64,
}

/// Parameter sets exercised by the default suite.
pub const DEFAULT_PARAM_SETS: [(f64, u32); 8] =
    [(2.5, 0), (4.5, 0), (6.0, 0), (9.5, 0), (6.0, 1), (6.0, 2), (9.5, 3), (9.5, 4)];

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            param_sets: DEFAULT_PARAM_SETS
                .iter()
                .map(|&(g, m)| ModelParams::new(g, m).expect("valid default"))
                .collect(),
            mass_gammas: vec![0.5, 1.0, 2.5, 6.0, 9.5],
            circle_level: DEFAULT_CIRCLE_LEVEL,
            disk_size: DEFAULT_DISK_SIZE,
            fd_step: 1e-3,
            series_tol: crate::coherent::VERIFY_TOL,
            jacobi_draws: 500,
            seed: 42,
        }
    }
}

impl SuiteConfig {
    /// Default settings for explicit `(γ, m)` pairs; an invalid pair is a
    /// configuration error.
    pub fn for_pairs(pairs: &[(f64, u32)]) -> Result<Self> {
        let param_sets = pairs
            .iter()
            .map(|&(g, m)| ModelParams::new(g, m).map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let mut mass_gammas: Vec<f64> = Vec::new();
        for p in &param_sets {
            for g in [p.gamma(), p.gamma_prime()] {
                if !mass_gammas.contains(&g) {
                    mass_gammas.push(g);
                }
            }
        }
        let cfg = Self { param_sets, mass_gammas, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.param_sets.is_empty() {
            return bad("no parameter sets".into());
        }
        if self.mass_gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return bad("mass check gammas must be positive".into());
        }
        if self.circle_level == 0 || self.circle_level > 24 {
            return bad(format!("circle level {} outside 1..=24", self.circle_level));
        }
        if self.disk_size.0 == 0 || self.disk_size.1 == 0 {
            return bad("disk rule sizes must be positive".into());
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.05) {
            return bad(format!("finite-difference step {} outside (0, 0.05)", self.fd_step));
        }
        if !(self.series_tol > 0.0 && self.series_tol < 1.0) {
            return bad(format!("series tolerance {} outside (0, 1)", self.series_tol));
        }
        Ok(())
    }
}

/// A measured defect before a tolerance is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub max_defect: f64,
    pub n_samples: usize,
    pub settings: BTreeMap<String, f64>,
}

impl Measurement {
    pub fn new(max_defect: f64, n_samples: usize) -> Self {
        Self { max_defect, n_samples, settings: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.settings.insert(key.to_owned(), value);
        self
    }

    /// Folds another sample's defect in; NaN defects propagate.
    pub fn absorb(&mut self, defect: f64) {
        self.n_samples += 1;
        if defect.is_nan() || defect > self.max_defect {
            self.max_defect = defect;
        }
    }
}

fn report(
    name: &str,
    params: Option<ModelParams>,
    tolerance: f64,
    run: impl FnOnce() -> Result<Measurement>,
) -> VerificationReport {
    let start = Instant::now();
    let outcome = run();
    let runtime_ms = start.elapsed().as_millis() as u64;
    let (max_defect, n_samples, settings, error) = match outcome {
        Ok(m) => (m.max_defect, m.n_samples, m.settings, None),
        // A check that cannot run has failed; its defect is NaN.
        Err(e) => (f64::NAN, 0, BTreeMap::new(), Some(e.to_string())),
    };
    VerificationReport {
        identity_name: name.to_owned(),
        params,
        settings,
        max_defect,
        tolerance,
        passed: max_defect <= tolerance,
        n_samples,
        runtime_ms,
        error,
    }
}

/// Tolerances attached to each identity by the suite.
pub mod tolerances {
    pub const MASS: f64 = 1e-10;
    pub const GRAM: f64 = 1e-8;
    pub const REDUCTION: f64 = 1e-12;
    pub const ORIGIN_CONTINUITY: f64 = 1e-6;
    pub const KERNEL: f64 = 1e-8;
    pub const SERIES_CLOSED: f64 = 1e-9;
    pub const NORMALIZATION: f64 = 1e-8;
    pub const BASIS_MAPPING: f64 = 1e-7;
    pub const ANTILINEARITY: f64 = 1e-12;
    pub const ISOMETRY: f64 = 1e-5;
    pub const EIGEN: f64 = 1e-3;
    /// Allowed deviation of the observed finite-difference order from 2.
    pub const FD_ORDER: f64 = 0.3;
    pub const RESOLUTION: f64 = 1e-6;
    pub const JACOBI: f64 = 1e-10;
    pub const POCHHAMMER: f64 = 1e-12;
}

/// Runs every identity check for `config`, in a fixed order.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    use checks::*;
    use tolerances as tol;
    config.validate()?;
    let mut out = Vec::new();
    let (level, disk) = (config.circle_level, config.disk_size);

    for &g in &config.mass_gammas {
        let p = ModelParams::lowest(g).ok();
        out.push(report("circle_mass", p, tol::MASS, || circle_mass(g, level)));
        out.push(report("disk_mass", p, tol::MASS, || disk_mass(g, disk)));
    }

    for &p in &config.param_sets {
        let sp = Some(p);
        if p.m() == 0 {
            out.push(report("gram_bergman", sp, tol::GRAM, || gram_bergman(p.gamma(), 12, disk)));
            out.push(report("eigen_m0_reduction", sp, tol::REDUCTION, || eigen_m0_reduction(p.gamma())));
        } else {
            out.push(report("gram_eigen", sp, tol::GRAM, || gram_eigen(p, 10, disk)));
            out.push(report("eigen_origin_continuity", sp, tol::ORIGIN_CONTINUITY, || {
                eigen_origin_continuity(p, 10)
            }));
        }
        out.push(report("gram_kets", sp, tol::GRAM, || gram_kets(p.gamma_prime(), 12, level)));
        out.push(report("kernel_consistency", sp, tol::KERNEL, || kernel_consistency(p, 400)));
        out.push(report("series_closed_agreement", sp, tol::SERIES_CLOSED, || {
            series_closed_agreement(p, config.series_tol)
        }));
        out.push(report("coherent_normalization", sp, tol::NORMALIZATION, || {
            coherent_normalization(p, level)
        }));
        if p.m() == 0 {
            out.push(report("coherent_m0_collapse", sp, tol::REDUCTION, || coherent_m0_collapse(p.gamma())));
            out.push(report("transform_m0_reduction", sp, tol::REDUCTION, || {
                transform_m0_reduction(p.gamma(), level, config.seed)
            }));
        }
        out.push(report("transform_basis_mapping", sp, tol::BASIS_MAPPING, || {
            transform_basis_mapping(p, 6, 0.8, level)
        }));
        out.push(report("transform_antilinearity", sp, tol::ANTILINEARITY, || {
            transform_antilinearity(p, level, config.seed)
        }));
        out.push(report("transform_isometry", sp, tol::ISOMETRY, || {
            transform_isometry(p, 8, level, disk, config.seed)
        }));
        // At m = 0 the eigenvalue is 0 and a relative defect measures only
        // the stencil error of an analytic function.
        if p.m() > 0 {
            let h = config.fd_step;
            out.push(report("eigen_equation_basis", sp, tol::EIGEN, || eigen_equation_basis(p, 5, h)));
            out.push(report("eigen_equation_transform", sp, tol::EIGEN, || {
                eigen_equation_transform(p, h, level)
            }));
            out.push(report("fd_order_basis", sp, tol::FD_ORDER, || fd_order_basis(p, 5, h)));
            out.push(report("fd_order_transform", sp, tol::FD_ORDER, || fd_order_transform(p, h, level)));
        }
        out.push(report("resolution_of_identity", sp, tol::RESOLUTION, || {
            resolution_of_identity(p, 4, level, disk)
        }));
        out.push(report("overlap_identity", sp, tol::RESOLUTION, || overlap_identity(p, 4, level, disk)));
    }

    let (draws, seed) = (config.jacobi_draws, config.seed);
    out.push(report("jacobi_hypergeometric_form", None, tol::JACOBI, || {
        jacobi_hypergeometric_form(draws, seed)
    }));
    out.push(report("jacobi_parity", None, tol::JACOBI, || jacobi_parity(draws, seed)));
    out.push(report("jacobi_radial_representation", None, tol::JACOBI, || {
        jacobi_radial_representation(draws, seed)
    }));
    out.push(report("pochhammer_gamma_ratio", None, tol::POCHHAMMER, || pochhammer_gamma_ratio(draws, seed)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::phi_bergman;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn landau_levels() {
        assert_eq!(landau_level(ModelParams::new(3.3, 0).unwrap()), 0.0);
        assert_eq!(landau_level(ModelParams::new(6.0, 1).unwrap()), 20.0);
        assert_eq!(landau_level(ModelParams::new(9.5, 4).unwrap()), 88.0);
    }

    #[test]
    fn operator_kills_constants_and_analytic_functions() {
        let v = apply_operator_fd(6.0, |_| Ok(c(1.0, 0.0)), c(0.3, 0.1), 1e-3).unwrap();
        assert!(v.norm() < 1e-9);
        // Analytic functions are annihilated up to an O(h²) stencil error.
        let f = |z| phi_bergman(3, 6.0, z);
        let z = c(0.3, 0.1);
        let coarse = apply_operator_fd(6.0, f, z, 1e-3).unwrap().norm();
        let fine = apply_operator_fd(6.0, f, z, 5e-4).unwrap().norm();
        assert!(coarse < 1e-3 * f(z).unwrap().norm());
        assert!((3.5..4.5).contains(&(coarse / fine)), "ratio {}", coarse / fine);
    }

    #[test]
    fn operator_eigen_example() {
        let p = ModelParams::new(6.0, 1).unwrap();
        let z = c(0.3, 0.1);
        let f = |w| phi_eigen(2, p, w);
        let v = apply_operator_fd(6.0, f, z, 1e-3).unwrap();
        let expect = f(z).unwrap() * 20.0;
        assert!((v - expect).norm() <= 1e-4 * expect.norm());
    }

    #[test]
    fn eigen_defect_second_order() {
        let p = ModelParams::new(6.0, 2).unwrap();
        let z = c(0.4, 0.0);
        let d: Vec<f64> = [2e-3, 1e-3, 5e-4].iter().map(|&h| eigen_defect(p, 3, z, h).unwrap()).collect();
        assert!(d[1] <= 1e-3);
        // Richardson: halving h divides an O(h²) error by ≈ 4.
        for pair in d.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn stencil_and_zero_guards() {
        let p = ModelParams::new(6.0, 1).unwrap();
        assert!(matches!(eigen_defect(p, 1, c(0.999, 0.0), 1e-3), Err(Error::StencilOutOfDomain(_))));
        assert!(matches!(eigen_defect(p, 0, c(0.0, 0.0), 1e-3), Err(Error::NearZeroValue(_))));
        assert!(apply_operator_fd(6.0, |_| Ok(c(1.0, 0.0)), c(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        assert!(matches!(SuiteConfig::for_pairs(&[(5.0, 3)]), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::for_pairs(&[(4.0, 2)]), Err(Error::Config(_))));
        let cfg = SuiteConfig::for_pairs(&[(6.0, 1)]).unwrap();
        assert_eq!(cfg.mass_gammas, vec![6.0, 4.0]);
        let bad = SuiteConfig { fd_step: 0.0, ..SuiteConfig::default() };
        assert!(run_suite(&bad).is_err());
    }

    #[test]
    fn measurement_propagates_nan() {
        let mut m = Measurement::new(0.0, 0);
        m.absorb(1e-3);
        m.absorb(f64::NAN);
        m.absorb(1.0);
        assert!(m.max_defect.is_nan());
        assert_eq!(m.n_samples, 3);
    }
}
