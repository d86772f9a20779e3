use benjamin_core::spectral::tilbert_symbol;
use benjamin_core::Model;
use proptest::prelude::*;

fn models() -> Vec<Model> {
    vec![
        Model::benjamin(1.3, 0.7).unwrap(),
        Model::ilw_benjamin(2.0, 1.0, 0.1).unwrap(),
        Model::mod_ilw_benjamin(1.0, 1.0, 0.5, 2.0).unwrap(),
        Model::kdv(1.0).unwrap(),
        Model::bo(1.0).unwrap(),
        Model::ilw(1.0, 0.9).unwrap(),
    ]
}

proptest! {
    #[test]
    fn linear_multiplier_is_imaginary_and_odd(k in -200.0f64..200.0) {
        for m in models() {
            let p = m.linear_multiplier(k);
            let q = m.linear_multiplier(-k);
            prop_assert_eq!(p.re, 0.0);
            prop_assert!((q + p).norm() <= 1e-13 * p.norm().max(1.0));
            prop_assert_eq!(q, p.conj());
        }
    }

    #[test]
    fn benjamin_phase_velocity_changes_sign_at_alpha_over_beta(
        alpha in 0.1f64..5.0, beta in 0.01f64..2.0, s in 0.01f64..0.99,
    ) {
        let m = Model::benjamin(alpha, beta).unwrap();
        let ks = alpha / beta;
        prop_assert!(m.phase_velocity(s * ks) < 0.0);
        prop_assert!(m.phase_velocity(ks / s) > 0.0);
        prop_assert!(m.phase_velocity(ks).abs() <= 1e-12 * alpha * ks);
    }

    #[test]
    fn ilw_symbol_is_nonnegative(k in -100.0f64..100.0, delta in 0.01f64..100.0) {
        let m = Model::ilw(1.0, delta).unwrap();
        let v = m.nonlocal_symbol(k);
        prop_assert!(v >= 0.0);
        if k != 0.0 {
            prop_assert!(v > 0.0);
        }
    }
}

#[test]
fn linear_multiplier_vanishes_at_zero() {
    for m in models() {
        assert_eq!(m.linear_multiplier(0.0).norm(), 0.0);
    }
}

#[test]
fn bo_limit_of_tilbert() {
    for &k in &[0.25, 1.0, -2.0, 7.5] {
        assert!((tilbert_symbol(k, 1e3).unwrap() - f64::abs(k)).abs() <= 1e-6);
    }
}
