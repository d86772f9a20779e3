use benjamin_core::spectral::{hilbert_symbol, tilbert_symbol};
use benjamin_core::{Complex64, RealField};
use proptest::prelude::*;

use crate::{grid, samples};

fn round_trip_error(n: usize, v: Vec<f64>) -> f64 {
    let f = RealField::new(grid(n, 1.7), v).unwrap();
    let back = f.forward().inverse();
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    f.max_abs_diff(&back).unwrap() / scale
}

fn parseval_defect(n: usize, v: Vec<f64>) -> f64 {
    let f = RealField::new(grid(n, 3.0), v).unwrap();
    let phys = f.values().iter().map(|x| x * x).sum::<f64>() / n as f64;
    let spec: f64 = f.forward().coeffs().iter().map(|c| c.norm_sqr()).sum();
    (phys - spec).abs() / phys.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn round_trip_n16(v in samples(16)) {
        prop_assert!(round_trip_error(16, v) <= 1e-13);
    }

    #[test]
    fn round_trip_n64(v in samples(64)) {
        prop_assert!(round_trip_error(64, v) <= 1e-13);
    }

    #[test]
    fn round_trip_n1024(v in samples(1024)) {
        prop_assert!(round_trip_error(1024, v) <= 1e-13);
    }

    // (1/N) Σ|u_j|² = Σ|û_k|² for the Fourier-series normalization
    #[test]
    fn parseval(v in samples(256)) {
        prop_assert!(parseval_defect(256, v) <= 1e-12);
    }

    #[test]
    fn hermitian_symbols_keep_fields_real(v in samples(128), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = RealField::new(grid(128, 2.0), v).unwrap().forward();
        // a k² + b H∂ₓ, both even and real
        let m = move |k: f64| Complex64::new(a * k * k, 0.0) + hilbert_symbol(k) * Complex64::new(0.0, b * k);
        let out = f.apply_multiplier(m);
        let scale = out.max_abs().max(1.0);
        prop_assert!(out.hermitian_defect() <= 1e-15 * scale);
    }

    #[test]
    fn odd_symbols_keep_fields_real(v in samples(64)) {
        let f = RealField::new(grid(64, 1.0), v).unwrap().forward();
        let d3 = f.apply_real_preserving(|k| Complex64::new(0.0, k * k * k));
        prop_assert!(d3.hermitian_defect() <= 1e-15 * d3.max_abs().max(1.0));
    }

    #[test]
    fn tilbert_shift_is_nonnegative(k in -1e3f64..1e3, delta in 1e-3f64..1e3) {
        let t = tilbert_symbol(k, delta).unwrap();
        prop_assert!(t - 1.0 / delta >= -1e-12 * t.abs().max(1.0 / delta));
    }
}

#[test]
fn tilbert_saturates_to_abs_k() {
    for &(k, d) in &[(40.0, 1.0), (-50.0, 2.0), (1e4, 0.01)] {
        let t = tilbert_symbol(k, d).unwrap();
        assert!((t - f64::abs(k)).abs() <= 1e-15 * f64::abs(k));
    }
    assert!(tilbert_symbol(1.0, 0.0).is_err());
}
