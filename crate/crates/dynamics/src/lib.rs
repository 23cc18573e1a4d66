//! Orbit evaluation for the unicritical family `f_c(z) = z^d + c`.
//!
//! Derivative magnitudes are carried as logarithms throughout; `|Df^n|`
//! leaves double range after a few hundred iterates of an expanding orbit.

mod distortion;
mod error;
mod family;
mod lyapunov;
mod orbit;
mod transversality;

pub use distortion::distortion_sum;
pub use error::DynamicsError;
pub use family::{default_escape_radius, step, FamilyParams};
pub use lyapunov::{gamma_bar_trivial, lyapunov_summary, LyapunovSummary};
pub use orbit::{
    ce_window_test, chain_identity_residual, critical_orbit, parameter_derivative, OrbitRecord,
};
pub use transversality::{transversality_ratio, Transversality};

pub use num_complex::Complex64;
