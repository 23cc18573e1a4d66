use ce_dynamics::OrbitRecord;

use crate::bound::{bound_period, r_index};
use crate::neighborhoods::{classify_modulus, CriticalNeighborhoods, ReturnKind};
use crate::BoundError;

/// One free return of a single parameter's critical orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnEvent {
    pub n: usize,
    /// `ReturnU` or `PseudoReturn`.
    pub kind: ReturnKind,
    pub dist: f64,
    pub r: i64,
    pub p: usize,
    /// Free steps before the next return. For the last event this runs to
    /// the end of the scanned window.
    pub ell: usize,
    pub open_ended: bool,
    /// The binding stretch reached the end of the orbit; `p` is a lower bound.
    pub truncated: bool,
    /// `xi_{n+p}` itself lies in `U'`; flagged, not enforced.
    pub bound_end_is_return: bool,
}

/// Free returns of `orbit` in `[1, n_max]` with their bound and free periods.
/// Returns falling inside a bound period are absorbed by it.
pub fn timeline(orbit: &OrbitRecord, nbhd: &CriticalNeighborhoods, n_max: usize) -> Vec<ReturnEvent> {
    let end = n_max.min(orbit.length());
    let mut events: Vec<ReturnEvent> = Vec::new();
    let mut n = 1;
    while n <= end {
        if orbit.escape_index == Some(n) {
            break;
        }
        let m = orbit.point(n).norm();
        let Some(kind) = classify_modulus(m, nbhd) else {
            n += 1;
            continue;
        };
        if let Some(prev) = events.last_mut() {
            prev.ell = n - (prev.n + prev.p + 1);
            prev.open_ended = false;
        }
        let (p, truncated) = match bound_period(orbit, n, nbhd.beta, end - n) {
            Ok(p) => (p, false),
            Err(BoundError::Truncated { p_so_far }) => (p_so_far, true),
        };
        let bound_end_is_return = p > 0 && classify_modulus(orbit.point(n + p).norm(), nbhd).is_some();
        let r = if m > 0.0 { r_index(m) } else { i64::MAX };
        events.push(ReturnEvent {
            n,
            kind,
            dist: m,
            r,
            p,
            ell: end.saturating_sub(n + p + 1),
            open_ended: true,
            truncated,
            bound_end_is_return,
        });
        if truncated {
            break;
        }
        n += p + 1;
    }
    events
}

/// Untruncated events with `p >= n`.
pub fn p_lt_n_violations(events: &[ReturnEvent]) -> Vec<ReturnEvent> {
    events.iter().filter(|e| !e.truncated && e.p >= e.n).copied().collect()
}

/// Index pairs `(i, j)` with `r_i <= r_j - 1` but `p_i > p_j + 2`.
pub fn bound_order_violations(events: &[ReturnEvent]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, a) in events.iter().enumerate() {
        for (j, b) in events.iter().enumerate() {
            if i == j || a.truncated || b.truncated {
                continue;
            }
            if a.r <= b.r - 1 && a.p > b.p + 2 {
                out.push((i, j));
            }
        }
    }
    out
}
