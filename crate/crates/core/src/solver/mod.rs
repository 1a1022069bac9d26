//! Bracketed root finding, adaptive quadrature and an RK4 integrator for
//! log-enstrophy ODEs.

mod quad;
mod rk4;
mod root;

pub use quad::{integrate_adaptive, MAX_DEPTH};
pub use rk4::{rk4_path, RkPath, StepControl};
pub use root::{find_root, MAX_ROOT_ITER};
