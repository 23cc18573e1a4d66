use ce_returns::{CriticalNeighborhoods, ReturnKind};

use crate::Geometry;

/// `dist / (log dist)^2`, 0 at `dist = 0`.
pub fn lower_bound_scale(dist: f64) -> f64 {
    if dist > 0.0 {
        let l = dist.ln();
        dist / (l * l)
    } else {
        0.0
    }
}

/// Single-time partition test: `diam <= dist/(log dist)^2` when the image
/// meets `U`, else `diam <= S`.
pub fn compliant_at(g: &Geometry, nbhd: &CriticalNeighborhoods) -> bool {
    if g.dist <= nbhd.delta() {
        g.diam <= lower_bound_scale(g.dist)
    } else {
        g.diam <= nbhd.large_scale()
    }
}

/// Partition element at the last time of `history` (one geometry per time).
pub fn is_partition_element(history: &[Geometry], nbhd: &CriticalNeighborhoods) -> bool {
    history.iter().all(|g| compliant_at(g, nbhd))
}

/// Essential iff `diam >= (1/2) dist/(log dist)^2`.
pub fn classify_return_set(g: &Geometry) -> ReturnKind {
    if g.diam >= 0.5 * lower_bound_scale(g.dist) {
        ReturnKind::EssentialSet
    } else {
        ReturnKind::InessentialSet
    }
}
