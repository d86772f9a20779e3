//! Property suite: transforms, multipliers, Jacobian consistency,
//! conservation and the post-processing invariants.

mod conservation;
mod diagnostics;
mod jacobian;
mod models;
mod spectral;

use std::sync::Arc;

use benjamin_core::spectral::make_grid;
use benjamin_core::{Grid, RealField};
use proptest::prelude::*;

pub fn grid(n: usize, l: f64) -> Arc<Grid> {
    make_grid(n, l).unwrap()
}

/// Random real samples of length `n` in `[-1, 1]`.
pub fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

/// A smooth random field: a few low harmonics with random amplitudes and phases.
pub fn smooth_field(g: &Arc<Grid>, amps: &[(f64, f64)]) -> RealField {
    let l = g.scale();
    RealField::from_fn(g.clone(), |x| {
        amps.iter()
            .enumerate()
            .map(|(j, &(a, p))| a * ((j + 1) as f64 * x / l + p).cos())
            .sum()
    })
}

pub fn harmonics(count: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, 0.0f64..std::f64::consts::TAU), count)
}
