//! Energy-enstrophy bounding curves for the 3D Navier-Stokes equations.
//!
//! The crate traces curves in the plane of energy `e = ‖u‖²` and enstrophy
//! `E` that enclose every globally bounded solution, under
//!
//! * critical (r = 1/2) vorticity-direction coherence ([`critical`]),
//! * sub-critical coherence, 1/2 < r ≤ 1 ([`subcritical`]),
//! * no extra assumption, for the full equations ([`full_nse`]),
//! * a small-`L^{3/2}` scaling-invariant condition ([`scaling`]).
//!
//! Enstrophies on these curves reach `10^{110}` and energies fall below
//! `10^{-3500}`, so curves are carried as natural logarithms and the
//! special-function kernels return [`LogScalar`]s. The numeric kernels are
//! generic over [`Scalar`]; the aliases below fix them to `f64`.

pub mod cli;
pub mod critical;
pub mod curve;
pub mod error;
pub mod export;
pub mod full_nse;
pub mod logscalar;
pub mod maxest;
pub mod params;
pub mod scalar;
pub mod scaling;
pub mod solver;
pub mod specfun;
pub mod subcritical;
pub mod verify;

pub use curve::{BoundingModel, PiecewiseCurve, RegionLabel, SegmentTag};
pub use error::{Error, Result};
pub use logscalar::LogScalar;
pub use params::{build_params, ModelParams, RawParams};
pub use scalar::Scalar;

/// Extended-range `f64`.
pub type LogScalar64 = LogScalar<f64>;
/// RK4 path in `f64`.
pub type RkPath64 = solver::RkPath<f64>;
/// RK4 step control in `f64`.
pub type StepControl64 = solver::StepControl<f64>;
