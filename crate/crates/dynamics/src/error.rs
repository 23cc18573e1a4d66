use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("escape radius {radius} is below the certificate bound {minimum}")]
    InvalidEscapeRadius { radius: f64, minimum: f64 },
    #[error("orbit left double range at k = {k} before the escape test fired")]
    NonFiniteOrbit { k: usize },
    #[error("window end {n_hi} exceeds orbit length {length}")]
    WindowBeyondOrbit { n_hi: usize, length: usize },
    #[error("critical orbit hits 0 at k = {k}; derivative vanishes")]
    DerivativeVanished { k: usize },
    #[error("reference orbit hits the critical point at j = {j}")]
    OrbitHitsCritical { j: usize },
    #[error("orbit escaped at k = {k}, before the requested time")]
    EscapedEarly { k: usize },
}
