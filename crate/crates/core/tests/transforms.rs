use circular_bargmann::bases::{phi_bergman, phi_eigen, KetCombination};
use circular_bargmann::quadrature::{CircleRule, DiskRule, DEFAULT_CIRCLE_LEVEL};
use circular_bargmann::transforms::{
    bargmann, bargmann_m, isometry_defect, polar_grid, transform_grid, transform_kets, transform_norm_sqr,
};
use circular_bargmann::{Complex64, Error, ModelParams};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(g: f64, m: u32) -> ModelParams {
    ModelParams::new(g, m).unwrap()
}

fn rule(gp: f64) -> CircleRule {
    CircleRule::new(gp, DEFAULT_CIRCLE_LEVEL).unwrap()
}

#[test]
fn lowest_level_maps_kets_to_bergman_basis() {
    let g = 4.5;
    let r = rule(g);
    let grid = polar_grid(4, 7, 0.8, true).unwrap();
    for n in 0..=8 {
        let k = KetCombination::single(g, n).unwrap();
        for &z in &grid {
            let v = bargmann(g, &k, z, &r).unwrap();
            assert!((v - phi_bergman(n, g, z).unwrap()).norm() < 1e-8, "n={n} z={z}");
        }
    }
    let one = KetCombination::single(g, 0).unwrap();
    let at_origin = bargmann(g, &one, c(0.0, 0.0), &r).unwrap();
    assert!((at_origin - (g / std::f64::consts::PI).sqrt()).norm() < 1e-13);
}

#[test]
fn antilinear_in_the_input() {
    // ket_0 + i ket_1 ↦ Φ_0 − i Φ_1
    let g = 6.0;
    let phi = KetCombination::new(g, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
    for z in [c(0.2, 0.3), c(-0.6, 0.1), c(0.0, -0.75)] {
        let v = bargmann(g, &phi, z, &rule(g)).unwrap();
        let expect = phi_bergman(0, g, z).unwrap() - c(0.0, 1.0) * phi_bergman(1, g, z).unwrap();
        assert!((v - expect).norm() < 1e-8);
    }
}

#[test]
fn level_m_maps_kets_to_eigen_basis() {
    let p = params(6.0, 2);
    let r = rule(p.gamma_prime());
    for z in polar_grid(5, 6, 0.7, true).unwrap() {
        let mapped = transform_kets(p, 6, z, &r).unwrap();
        for (n, v) in mapped.iter().enumerate() {
            assert!((v - phi_eigen(n as u32, p, z).unwrap()).norm() < 1e-7);
        }
    }
    let p = params(6.0, 1);
    let k0 = KetCombination::single(4.0, 0).unwrap();
    assert!(bargmann_m(p, &k0, c(0.0, 0.0), &rule(4.0)).unwrap().norm() < 1e-14);
}

#[test]
fn grid_transform_follows_input_order() {
    let p = params(6.0, 1);
    let grid = polar_grid(11, 8, 0.85, false).unwrap();
    let k1 = KetCombination::single(4.0, 1).unwrap();
    let out = transform_grid(p, &k1, &grid, &rule(4.0)).unwrap();
    assert_eq!(out.points, grid);
    for (z, v) in out.points.iter().zip(&out.values) {
        assert!((v - phi_eigen(1, p, *z).unwrap()).norm() < 1e-7);
    }
    let empty = transform_grid(p, &k1, &[], &rule(4.0)).unwrap();
    assert!(empty.is_empty());
}

#[test]
fn grid_errors_name_the_point() {
    let p = params(6.0, 1);
    let k1 = KetCombination::single(4.0, 1).unwrap();
    let bad = [c(0.1, 0.0), c(1.0, 0.0)];
    match transform_grid(p, &k1, &bad, &rule(4.0)) {
        Err(Error::AtPoint { index, .. }) => assert_eq!(index, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn isometry_examples() {
    let k0 = KetCombination::single(4.5, 0).unwrap();
    let d = isometry_defect(params(4.5, 0), &k0, &rule(4.5), &DiskRule::new(4.5, 32, 64).unwrap()).unwrap();
    assert!(d <= 1e-6, "{d}");
    let p = params(6.0, 1);
    let phi = KetCombination::new(4.0, vec![c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let d_rule = DiskRule::with_boundary_order(6.0, 1, 32, 64).unwrap();
    let norm = transform_norm_sqr(p, &phi, &rule(4.0), &d_rule).unwrap();
    assert!((norm - 5.0).abs() <= 5e-6, "{norm}");
    let zero = KetCombination::new(4.0, vec![c(0.0, 0.0)]).unwrap();
    assert!(matches!(isometry_defect(p, &zero, &rule(4.0), &d_rule), Err(Error::ZeroNorm)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_combinations_are_isometric(
        set in 0usize..5,
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=7),
    ) {
        let (g, m) = [(2.5, 0), (4.5, 0), (6.0, 1), (6.0, 2), (9.5, 3)][set];
        let p = params(g, m);
        let coeffs: Vec<Complex64> = coeffs.into_iter().map(|(a, b)| c(a, b)).collect();
        prop_assume!(coeffs.iter().any(|z| z.norm() > 1e-3));
        let phi = KetCombination::new(p.gamma_prime(), coeffs).unwrap();
        let d_rule = DiskRule::with_boundary_order(g, m, 32, 64).unwrap();
        let d = isometry_defect(p, &phi, &rule(p.gamma_prime()), &d_rule).unwrap();
        prop_assert!(d <= 1e-5, "defect {}", d);
    }

    #[test]
    fn level_zero_reduction(
        g in 0.5..10.0f64,
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=5),
        r in 0.0..0.9f64,
        a in 0.0..6.3f64,
    ) {
        let phi = KetCombination::new(g, coeffs.into_iter().map(|(x, y)| c(x, y)).collect()).unwrap();
        let z = Complex64::from_polar(r, a);
        let lowest = bargmann(g, &phi, z, &rule(g)).unwrap();
        let level0 = bargmann_m(ModelParams::lowest(g).unwrap(), &phi, z, &rule(g)).unwrap();
        prop_assert!((lowest - level0).norm() <= 1e-12 * lowest.norm().max(1.0));
    }

    #[test]
    fn conjugate_scaling(g in 1.0..8.0f64, re in -2.0..2.0f64, im in -2.0..2.0f64, r in 0.0..0.85f64, a in 0.0..6.3f64) {
        let alpha = c(re, im);
        let base = KetCombination::new(g, vec![c(0.3, 0.0), c(0.0, -0.7), c(0.5, 0.5)]).unwrap();
        let scaled = KetCombination::new(g, base.coeffs().iter().map(|x| x * alpha).collect()).unwrap();
        let z = Complex64::from_polar(r, a);
        let lhs = bargmann(g, &scaled, z, &rule(g)).unwrap();
        let rhs = bargmann(g, &base, z, &rule(g)).unwrap() * alpha.conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }
}
