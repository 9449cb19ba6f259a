use circular_bargmann::verify::{
    apply_operator_fd, checks, eigen_defect, landau_level, run_suite, SuiteConfig, DEFAULT_PARAM_SETS,
};
use circular_bargmann::{bases::phi_eigen, Complex64, Error, ModelParams};

fn params(g: f64, m: u32) -> ModelParams {
    ModelParams::new(g, m).unwrap()
}

#[test]
fn landau_levels() {
    assert_eq!(landau_level(params(2.5, 0)), 0.0);
    assert_eq!(landau_level(params(6.0, 1)), 20.0);
    assert_eq!(landau_level(params(9.5, 4)), 88.0);
}

#[test]
fn operator_examples() {
    let z = Complex64::new(0.3, 0.1);
    let v = apply_operator_fd(6.0, |_| Ok(Complex64::new(1.0, 0.0)), z, 1e-3).unwrap();
    assert!(v.norm() < 1e-9);
    let p = params(6.0, 1);
    let f = |w| phi_eigen(2, p, w);
    let v = apply_operator_fd(6.0, f, z, 1e-3).unwrap();
    let expect = f(z).unwrap() * 20.0;
    assert!((v - expect).norm() <= 1e-4 * expect.norm());
    assert!(matches!(
        apply_operator_fd(6.0, f, Complex64::new(0.999, 0.0), 1e-3),
        Err(Error::StencilOutOfDomain(_))
    ));
}

#[test]
fn eigen_defect_example_and_order() {
    let p = params(6.0, 2);
    let z = Complex64::new(0.4, 0.0);
    let d: Vec<f64> = [2e-3, 1e-3, 5e-4].iter().map(|&h| eigen_defect(p, 3, z, h).unwrap()).collect();
    assert!(d[1] <= 1e-3);
    assert!((3.5..4.5).contains(&(d[0] / d[1])) && (3.5..4.5).contains(&(d[1] / d[2])), "{d:?}");
}

#[test]
fn jacobi_battery_is_seeded() {
    let a = checks::jacobi_parity(50, 7).unwrap();
    let b = checks::jacobi_parity(50, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n_samples, 50);
}

#[test]
fn suite_is_deterministic_and_complete() {
    let cfg = SuiteConfig { jacobi_draws: 50, ..SuiteConfig::for_pairs(&[(4.5, 0), (6.0, 1)]).unwrap() };
    let mut a = run_suite(&cfg).unwrap();
    let mut b = run_suite(&cfg).unwrap();
    for r in a.iter_mut().chain(b.iter_mut()) {
        r.runtime_ms = 0;
    }
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.iter().all(|r| r.passed == (r.max_defect <= r.tolerance)));
    for name in ["gram_bergman", "gram_eigen", "resolution_of_identity", "overlap_identity", "jacobi_parity"] {
        assert!(a.iter().any(|r| r.identity_name == name), "{name} missing");
    }
}

#[test]
fn suite_rejects_bad_configs() {
    assert!(matches!(SuiteConfig::for_pairs(&[(5.0, 3)]), Err(Error::Config(_))));
    let bad = SuiteConfig { circle_level: 0, ..SuiteConfig::default() };
    assert!(matches!(run_suite(&bad), Err(Error::Config(_))));
    assert_eq!(SuiteConfig::default().param_sets.len(), DEFAULT_PARAM_SETS.len());
}
