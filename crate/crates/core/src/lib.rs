//! Periodic Fourier spectral toolkit for the Benjamin family of nonlocal
//! dispersive equations.
//!
//! The crate covers four layers:
//!
//! * [`spectral`]: periodic grids, the discrete Fourier transform and
//!   Fourier multipliers (Hilbert, Tilbert, derivatives).
//! * [`model`]: equation families (Benjamin, ILW-Benjamin, two-depth
//!   ILW-Benjamin, KdV, BO, ILW), their dispersion symbols and conserved
//!   functionals.
//! * [`traveling`]: matrix-free Newton-Krylov computation of solitary and
//!   periodic traveling waves, parameter continuation and tail analysis.
//! * [`evolution`]: fourth-order exponential time differencing (ETDRK4) for
//!   the initial value problem with per-step diagnostics.
//!
//! [`diagnostics`] contains post-processing used by the experiment harness.
//!
//! All fields live on the periodic interval `L·[-π, π)`. Fourier
//! coefficients are normalized as Fourier series amplitudes,
//! `û_k = (1/N) Σ_j u(x_j) e^{-i k x_j}`, so `u(x) = Σ_k û_k e^{i k x}`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod model;
pub mod spectral;
pub mod traveling;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use model::{Family, Model};
pub use spectral::{Grid, RealField, SpectralField};

pub use num_complex::Complex64;
