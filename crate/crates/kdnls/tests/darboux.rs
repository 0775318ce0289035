use kdnls::catalog::{self, Transcription, BREATHER_PERIOD};
use kdnls::darboux::*;
use kdnls::lax::*;
use kdnls::numerics::{Grid2D, Precision};
use kdnls::verify::{
    compare_fields, pde_residual, relative_intensity_error, CompareMode, ConventionVariant,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn zero_seed() -> Seed {
    Seed::zero(1.0, 1.0, 1.0).unwrap()
}

fn pw() -> Seed {
    make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).unwrap()
}

#[test]
fn one_fold_matches_n_fold() {
    for (seed, l, w) in [
        (zero_seed(), c(1.0, 2.0), (ONE, ONE)),
        (pw(), c(0.5, 0.5), (c(0.3, 1.0), ONE)),
    ] {
        let set = build_reduced_set(&[l], &seed, &[w]).unwrap();
        let a = one_fold(&set, &seed).unwrap();
        let b = n_fold(&set, &seed).unwrap();
        for (x, t) in [(0.0, 0.0), (0.7, -1.3), (-2.2, 0.4), (3.1, 2.9)] {
            let (qa, qb) = (a.eval(x, t).unwrap(), b.eval(x, t).unwrap());
            assert!(
                (qa - qb).norm() <= 1e-12 * qa.norm().max(1.0),
                "({x},{t}): {qa} vs {qb}"
            );
        }
    }
}

#[test]
fn one_soliton_matches_closed_form() {
    let g = Grid2D::new(-3.0, 3.0, -2.0, 2.0, 101, 101).unwrap();
    let set = build_reduced_set(&[c(1.0, 2.0)], &zero_seed(), &[(ONE, ONE)]).unwrap();
    let a = n_fold(&set, &zero_seed()).unwrap().sample(&g);
    let b = catalog::one_soliton(1.0, 2.0, 1.0, 1.0, 1.0, Transcription::Corrected)
        .unwrap()
        .sample(&g);
    assert!(compare_fields(&a, &b, CompareMode::Intensity).unwrap().0 <= 1e-9);
}

#[test]
fn two_soliton_matches_closed_form() {
    let g = Grid2D::new(-10.0, 10.0, -10.0, 10.0, 201, 201).unwrap();
    let set =
        build_reduced_set(&[c(0.7, 0.3), c(0.5, 0.5)], &zero_seed(), &[(ONE, ONE); 2]).unwrap();
    let a = n_fold(&set, &zero_seed()).unwrap().sample(&g);
    let b = catalog::two_soliton(0.7, 0.3, 0.5, 0.5, 1.0, Transcription::Corrected)
        .unwrap()
        .sample(&g);
    assert!(relative_intensity_error(&a, &b, 0.01).unwrap() <= 1e-6);
}

#[test]
fn breather_matches_closed_form_and_is_periodic() {
    let set = build_reduced_set(&[c(0.5, 0.5)], &pw(), &[(ONE, ONE)]).unwrap();
    let out = n_fold(&set, &pw()).unwrap();
    let g = Grid2D::new(-5.0, 5.0, -5.0, 5.0, 101, 101).unwrap();
    let b = catalog::breather(Transcription::Corrected).sample(&g);
    assert!(relative_intensity_error(&out.sample(&g), &b, 0.01).unwrap() <= 1e-5);
    for (x, t) in [(0.3, 0.1), (-2.0, 1.5), (1.1, -3.0)] {
        let a = out.eval(x, t).unwrap().norm_sqr();
        let p = out.eval(x + BREATHER_PERIOD, t).unwrap().norm_sqr();
        assert!((a - p).abs() <= 1e-6 * a.max(1.0));
    }
}

#[test]
fn two_fold_solution_satisfies_pde() {
    let seed = pw();
    let set = build_reduced_set(
        &[c(0.5, 0.5), c(0.3, 1.2)],
        &seed,
        &[(ONE, ONE), (c(0.3, 0.4), ONE)],
    )
    .unwrap();
    let out = n_fold(&set, &seed).unwrap();
    let g = Grid2D::new(-3.0, 3.0, -3.0, 3.0, 121, 121).unwrap();
    let r = pde_residual(
        |x, t| out.q_new(x, t),
        &seed,
        ConventionVariant::CANONICAL,
        &g,
        3,
    )
    .unwrap();
    assert!(r.order_in(1.7, 2.3), "order {}", r.estimated_order);
}

#[test]
fn second_order_rogue_limit() {
    let spec = DegenerationSpec::new(c(1.0, 1.0), 1e-3, 2, PhasePolynomial::default());
    let out = degenerate_limit(&spec, &pw()).unwrap();
    assert_eq!(out.precision(), Precision::Extended);
    let r = catalog::rogue2(Transcription::Corrected);
    let mut worst = 0.0f64;
    for i in -4..=4 {
        for j in -4..=4 {
            let (x, t) = (i as f64, j as f64);
            worst = worst.max((out.eval(x, t).unwrap().norm_sqr() - r.eval(x, t).norm_sqr()).abs());
        }
    }
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn auto_precision_threshold() {
    assert_eq!(auto_precision(1e-2), Precision::Double);
    assert_eq!(auto_precision(1e-3), Precision::Extended);
    let spec = DegenerationSpec::new(c(1.0, 1.0), 1e-2, 2, PhasePolynomial::default());
    let forced =
        degenerate_limit_with(&spec, &pw(), DtConfig::with_precision(Precision::Extended)).unwrap();
    let plain = degenerate_limit(&spec, &pw()).unwrap();
    let (a, b) = (
        forced.eval(0.3, 0.2).unwrap(),
        plain.eval(0.3, 0.2).unwrap(),
    );
    assert!((a - b).norm() < 1e-8 * a.norm());
}

#[test]
fn invalid_degeneration_rejected() {
    for spec in [
        DegenerationSpec::new(c(1.0, 1.0), 0.0, 2, PhasePolynomial::default()),
        DegenerationSpec::new(c(1.0, 1.0), 1e-2, 4, PhasePolynomial::default()),
        DegenerationSpec::new(c(1.0, 0.0), 1e-2, 2, PhasePolynomial::default()),
    ] {
        assert!(degenerate_limit(&spec, &pw()).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_covariance(fr in 0.2..3.0f64, fi in -3.0..3.0f64, x in -5.0..5.0f64, t in -5.0..5.0f64) {
        let seed = pw();
        let set = build_reduced_set(&[c(0.5, 0.5), c(0.3, 1.2)], &seed, &[(ONE, ONE), (c(0.3, 0.4), ONE)]).unwrap();
        let a = n_fold(&set, &seed).unwrap();
        let b = n_fold(&set.rescaled(c(fr, fi)), &seed).unwrap();
        if let (Ok(p), Ok(q)) = (a.eval(x, t), b.eval(x, t)) {
            prop_assert!((p - q).norm() <= 1e-10 * p.norm().max(1.0));
        }
    }

    #[test]
    fn reduction_symmetry(l1r in 0.2..1.5f64, l1i in 0.2..1.5f64, x in -5.0..5.0f64, t in -5.0..5.0f64) {
        let z = zero_seed();
        prop_assume!((c(l1r, l1i) - c(0.5, 0.5)).norm() > 0.05);
        let set = build_reduced_set(&[c(l1r, l1i), c(0.5, 0.5)], &z, &[(ONE, ONE); 2]).unwrap();
        let out = n_fold(&set, &z).unwrap();
        if let (Ok(q), Ok(r)) = (out.eval(x, t), out.companion_r(x, t)) {
            prop_assert!((r + q.conj()).norm() <= 1e-8 * q.norm().max(1.0));
        }
    }

    #[test]
    fn eigenfunction_linear_in_weights(d1r in -2.0..2.0f64, d1i in -2.0..2.0f64, d2r in -2.0..2.0f64, d2i in -2.0..2.0f64, x in -3.0..3.0f64, t in -3.0..3.0f64) {
        let seed = pw();
        let l = c(0.6, 0.9);
        let (d1, d2) = (c(d1r, d1i), c(d2r, d2i));
        let f = plane_wave_eigenfunction(l, &seed, (d1, d2)).unwrap();
        let a = plane_wave_eigenfunction(l, &seed, (ONE, c(0.0, 0.0))).unwrap();
        let b = plane_wave_eigenfunction(l, &seed, (c(0.0, 0.0), ONE)).unwrap();
        let lin = d1 * a.phi(x, t) + d2 * b.phi(x, t);
        prop_assert!((f.phi(x, t) - lin).norm() <= 1e-12 * lin.norm().max(1.0));
    }
}
