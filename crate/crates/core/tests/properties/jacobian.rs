use benjamin_core::traveling::{jacobian_action, kdv_soliton, residual_of_profile};
use benjamin_core::{Model, RealField};
use proptest::prelude::*;

use crate::{grid, harmonics, smooth_field};

fn fd_error(q: &RealField, h: &RealField, m: &Model, c: f64, eps: f64) -> f64 {
    let base = residual_of_profile(q, m, c).inverse();
    let shifted = residual_of_profile(&q.add(&h.scaled(eps)).unwrap(), m, c).inverse();
    let jh = jacobian_action(q, m, c, h).unwrap();
    let fd: Vec<f64> = shifted
        .values()
        .iter()
        .zip(base.values())
        .map(|(a, b)| (a - b) / eps)
        .collect();
    fd.iter().zip(jh.values()).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // The residual is quadratic, so the FD error is exactly ε·max|h²|/2 up to
    // round-off: first order in ε.
    #[test]
    fn finite_differences_converge_at_first_order(amps in harmonics(4), alpha in 0.0f64..2.0) {
        let g = grid(64, 4.0);
        let m = Model::benjamin(alpha, 1.0).unwrap();
        let q = kdv_soliton(-1.0, 1.0, &g).unwrap();
        let h = smooth_field(&g, &amps);
        prop_assume!(h.max_abs() > 0.5);
        let e4 = fd_error(&q, &h, &m, -1.0, 1e-4);
        let e6 = fd_error(&q, &h, &m, -1.0, 1e-6);
        let ratio = e4 / e6;
        prop_assert!((50.0..200.0).contains(&ratio), "e4 {e4:e} e6 {e6:e}");
        let h2 = h.values().iter().map(|v| v * v).fold(0.0, f64::max);
        prop_assert!((e4 - 0.5e-4 * h2).abs() <= 1e-2 * e4);
    }
}
