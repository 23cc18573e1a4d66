use ce_dynamics::{default_escape_radius, Complex64, FamilyParams, OrbitRecord};
use ce_returns::CriticalNeighborhoods;

use crate::DensityError;

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Lower convex hull of points sorted by `x` (monotone chain).
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut h: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
            h.pop();
        }
        h.push(p);
    }
    h
}

/// Upper concave hull of points sorted by `x`.
pub fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut h: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], p) >= 0.0 {
            h.pop();
        }
        h.push(p);
    }
    h
}

/// Slope of the hull edge over `x`, or `None` for a single vertex.
fn support_slope(h: &[(f64, f64)], x: f64) -> Option<f64> {
    let e = h.windows(2).find(|e| e[1].0 >= x).or_else(|| h.windows(2).last())?;
    Some((e[1].1 - e[0].1) / (e[1].0 - e[0].0))
}

fn mid(points: &[(f64, f64)]) -> f64 {
    (points[0].0 + points[points.len() - 1].0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceFit {
    pub k: f64,
    pub alpha_fit: f64,
}

/// `|xi_n| >= K e^{-alpha n}` for every `n >= 1` of the orbit.
///
/// `alpha` is the slope of the upper hull of `(n, -log|xi_n|)` over the
/// middle of the orbit, clamped at 0; `K <= 1` is then the largest
/// constant that works. The middle edge ignores end effects of a finite
/// orbit.
pub fn initial_recurrence_fit(orbit: &OrbitRecord) -> RecurrenceFit {
    let pts: Vec<(f64, f64)> = (1..=orbit.length()).map(|n| (n as f64, -orbit.point(n).norm().ln())).collect();
    if pts.iter().any(|p| p.1.is_infinite()) {
        return RecurrenceFit { k: 0.0, alpha_fit: f64::INFINITY };
    }
    let alpha_fit = support_slope(&upper_hull(&pts), mid(&pts)).unwrap_or(0.0).max(0.0);
    let b = pts.iter().map(|&(n, y)| y - alpha_fit * n).fold(f64::NEG_INFINITY, f64::max);
    RecurrenceFit { k: (-b).exp().min(1.0), alpha_fit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutsideExpansion {
    pub c_u: f64,
    pub gamma_h: f64,
    /// Segments kept in the pool.
    pub segments: usize,
    /// `min over the pool of log|Df^n(z)|`, `n = 1..=n_seg`.
    pub min_log_derivative: Vec<f64>,
}

/// Fits `log|Df^n(z)| >= log C_U + gamma_H n` over segments of length
/// `n_seg` that start at `starts`, stay bounded and never enter `U`.
///
/// `gamma_H` is the slope of the lower hull of the pool minimum over the
/// middle of the segment length;
/// `C_U` is the largest constant for it. A single time step gives
/// `C_U = 1`.
pub fn outside_expansion_estimate(
    params: &FamilyParams,
    nbhd: &CriticalNeighborhoods,
    starts: &[Complex64],
    n_seg: usize,
) -> Result<OutsideExpansion, DensityError> {
    let (d, c) = (params.d, params.c);
    let r = default_escape_radius(d, c);
    let delta = nbhd.delta();
    let log_d = f64::from(d).ln();
    let dm1 = f64::from(d - 1);
    let mut mins = vec![f64::INFINITY; n_seg];
    let mut segments = 0;
    for &z0 in starts {
        let mut z = z0;
        let mut acc = 0.0;
        let mut logs = Vec::with_capacity(n_seg);
        let ok = (0..n_seg).all(|_| {
            let m = z.norm();
            if m <= delta || m > r {
                return false;
            }
            acc += log_d + dm1 * m.ln();
            logs.push(acc);
            z = z.powu(d) + c;
            true
        });
        if ok {
            segments += 1;
            for (m, l) in mins.iter_mut().zip(logs) {
                *m = m.min(l);
            }
        }
    }
    if segments == 0 || n_seg == 0 {
        return Err(DensityError::EmptyPool);
    }
    let pts: Vec<(f64, f64)> = mins.iter().enumerate().map(|(i, &m)| ((i + 1) as f64, m)).collect();
    let (c_u, gamma_h) = match support_slope(&lower_hull(&pts), mid(&pts)) {
        None => (1.0, mins[0]),
        Some(g) => {
            let log_c = pts.iter().map(|&(n, m)| m - g * n).fold(f64::INFINITY, f64::min);
            (log_c.exp(), g)
        }
    };
    Ok(OutsideExpansion { c_u, gamma_h, segments, min_log_derivative: mins })
}
