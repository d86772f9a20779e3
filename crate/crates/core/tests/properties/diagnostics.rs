use benjamin_core::diagnostics::{plateau_detect, plateau_variation, radiation_split};
use benjamin_core::{Model, RealField};
use proptest::prelude::*;

use crate::{grid, samples};

fn series() -> impl Strategy<Value = Vec<f64>> {
    (40usize..400, 0.5f64..5.0, -0.2f64..0.2, 0.0f64..0.3, 0.5f64..20.0).prop_map(|(n, base, slope, wig, freq)| {
        (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                base * (1.0 + slope * t) + wig * (freq * t * 6.3).sin()
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn plateau_is_scale_invariant(s in series(), a in 1e-3f64..1e3) {
        let scaled: Vec<f64> = s.iter().map(|v| a * v).collect();
        let v0 = plateau_variation(&s, 0.25).unwrap();
        let v1 = plateau_variation(&scaled, 0.25).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-9 * v0.max(1e-12), "{v0:e} {v1:e}");
        if (v0 - 0.05).abs() > 1e-9 {
            prop_assert_eq!(plateau_detect(&s, 0.25, 0.05).unwrap(), plateau_detect(&scaled, 0.25, 0.05).unwrap());
        }
    }

    // Only the trailing window matters: the origin of time and any history
    // before the window leave the verdict unchanged.
    #[test]
    fn plateau_ignores_history(s in series(), junk in -10.0f64..10.0) {
        let keep = (s.len() as f64 * 0.25).round() as usize;
        let mut other = s.clone();
        let cut = s.len() - keep;
        for v in &mut other[..cut] {
            *v = junk;
        }
        prop_assert_eq!(plateau_variation(&s, 0.25).unwrap(), plateau_variation(&other, 0.25).unwrap());
    }

    #[test]
    fn radiation_split_sums_to_total(v in samples(256), alpha in 0.1f64..3.0, beta in 0.01f64..1.0) {
        let u = RealField::new(grid(256, 5.0), v).unwrap();
        let f = u.forward();
        let m = Model::benjamin(alpha, beta).unwrap();
        let (left, right) = radiation_split(&f, &m).unwrap();
        let total = u.grid().period() * f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        prop_assert!(((left + right) - total).abs() <= 1e-12 * total);
        prop_assert!(left >= 0.0 && right >= 0.0);
    }
}
