use benjamin_core::evolution::evolve;
use benjamin_core::{Model, RealField};
use proptest::prelude::*;

use crate::{grid, harmonics, smooth_field};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn mass_and_energy_drift_stay_small(amps in harmonics(3), alpha in 0.0f64..2.0, mean in -0.5f64..0.5) {
        let g = grid(128, 2.0);
        let m = Model::benjamin(alpha, 1.0).unwrap();
        let u0 = smooth_field(&g, &amps);
        let u0 = RealField::from_fn(g.clone(), |_| mean).add(&u0).unwrap();
        prop_assume!(u0.max_abs() > 0.1);
        let t_end = 0.5;
        let tr = evolve(&u0, &m, t_end, 2000, 1000).unwrap();
        prop_assert!(tr.series.max_mass_drift() <= 1e-12, "mass {:e}", tr.series.max_mass_drift());
        let e = tr.series.max_energy_drift();
        prop_assert!(e / t_end <= 1e-10, "energy {e:e}");
    }
}
