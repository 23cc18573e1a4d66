use num_complex::Complex64;

use crate::OrbitRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSummary {
    /// Minimum of `gamma_k` over the tail window; `-inf` for orbits through 0.
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    /// `sup_{|z| <= 2} log |Df_c(z)|`, independent of `c`.
    pub gamma_bar_trivial: f64,
}

/// Grid maximum of `log|d z^{d-1}|` over the closed disc of radius 2.
pub fn gamma_bar_trivial(d: u32) -> f64 {
    const RADII: usize = 64;
    const ANGLES: usize = 64;
    let mut best = f64::NEG_INFINITY;
    for i in 1..=RADII {
        let r = 2.0 * i as f64 / RADII as f64;
        for j in 0..ANGLES {
            let theta = std::f64::consts::TAU * j as f64 / ANGLES as f64;
            let z = Complex64::from_polar(r, theta);
            let v = (z.powu(d - 1) * f64::from(d)).norm().ln();
            best = best.max(v);
        }
    }
    best
}

/// Min and max of `gamma_k` over the last `tail_fraction` of the orbit.
pub fn lyapunov_summary(orbit: &OrbitRecord, tail_fraction: f64) -> LyapunovSummary {
    let n = orbit.length();
    assert!(n >= 10, "orbit too short for a window estimate");
    assert!(tail_fraction > 0.0 && tail_fraction <= 1.0);
    let m = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    let window = &orbit.gamma[n - m + 1..=n];
    let lower = window.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    LyapunovSummary {
        gamma_lower: lower,
        gamma_upper: upper,
        gamma_bar_trivial: gamma_bar_trivial(orbit.params.d),
    }
}
