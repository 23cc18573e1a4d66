use ce_dynamics::OrbitRecord;

use crate::BoundError;

/// Length of the binding stretch after the return at `n`: the largest `p`
/// with `|xi_{n+j} - xi_j| <= e^{-beta j} |xi_j|` for every `1 <= j <= p`.
///
/// `j` runs up to `j_max`, capped by the stored orbit.
pub fn bound_period(orbit: &OrbitRecord, n: usize, beta: f64, j_max: usize) -> Result<usize, BoundError> {
    let j_max = j_max.min(orbit.length().saturating_sub(n));
    for j in 1..=j_max {
        let early = orbit.point(j);
        let gap = (orbit.point(n + j) - early).norm();
        if gap > (-beta * j as f64).exp() * early.norm() {
            return Ok(j - 1);
        }
    }
    Err(BoundError::Truncated { p_so_far: j_max })
}

/// Depth index `r` with `e^{-r-1/2} <= dist < e^{-r+1/2}`.
pub fn r_index(dist: f64) -> i64 {
    assert!(dist > 0.0 && dist < 1.0, "r_index needs 0 < dist < 1, got {dist}");
    let mut r = (-dist.ln() - 0.5).ceil() as i64;
    // ln/exp rounding can put the formula one off at the bracket edges.
    while dist < (-(r as f64) - 0.5).exp() {
        r += 1;
    }
    while dist >= (-(r as f64) + 0.5).exp() {
        r -= 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPrediction {
    pub p_lo: f64,
    pub p_hi: f64,
    /// Log of the guaranteed derivative gain over the bound period.
    pub log_expansion_lower: f64,
}

pub fn bound_period_prediction(
    r: f64,
    gamma_p: f64,
    alpha_p1: f64,
    beta: f64,
    eta: f64,
    d: u32,
) -> BoundPrediction {
    let df = f64::from(d);
    let rate = gamma_p + alpha_p1 + beta;
    BoundPrediction {
        p_lo: (1.0 - eta) * df * r / rate,
        p_hi: (1.0 + eta) * df * r / rate,
        log_expansion_lower: (1.0 - eta) * ((gamma_p - (df - 1.0) * (alpha_p1 + beta)) / rate) * r,
    }
}
