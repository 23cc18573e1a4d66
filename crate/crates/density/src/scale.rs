use std::io::Write;

use ce_dynamics::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::{membership_sample, membership_sample_extended, DensityError, Membership, Sampler};

/// Below this side length samples are iterated in double-double.
pub const EXTENDED_SWITCH: f64 = 1e-13;
/// Smallest side length double-double still resolves around `|c0| ~ 2`.
pub const EXTENDED_FLOOR: f64 = 1e-27;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub k: usize,
    pub epsilon: f64,
    pub samples: usize,
    pub escaped: usize,
    pub undetermined: usize,
    pub density: f64,
    pub wilson_halfwidth: f64,
}

/// 95% Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Escape fraction over the sampler's points in `Q(c0, epsilon)`.
/// Row `k` is a label carried into the output.
pub fn density_at_scale(
    c0: Complex64,
    d: u32,
    epsilon: f64,
    sampler: &Sampler,
    n_max: usize,
    k: usize,
) -> Result<DensityRow, DensityError> {
    if epsilon < EXTENDED_FLOOR {
        return Err(DensityError::PrecisionExhausted { epsilon });
    }
    let extended = epsilon < EXTENDED_SWITCH;
    let escaped: usize = (0..sampler.side())
        .into_par_iter()
        .map(|j| {
            sampler
                .row(j)
                .into_iter()
                .filter(|&(u, v)| {
                    let off = Complex64::new(epsilon * u, epsilon * v);
                    let m = if extended {
                        membership_sample_extended(c0, off, d, n_max)
                    } else {
                        membership_sample(c0 + off, d, n_max)
                    };
                    matches!(m, Membership::Escaped(_))
                })
                .count()
        })
        .sum();
    let samples = sampler.samples();
    let (lo, hi) = wilson_interval(escaped, samples);
    Ok(DensityRow {
        k,
        epsilon,
        samples,
        escaped,
        undetermined: samples - escaped,
        density: escaped as f64 / samples as f64,
        wilson_halfwidth: (hi - lo) / 2.0,
    })
}

/// Iteration budget per scale index: `base * growth^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NSchedule {
    pub base: usize,
    pub growth: usize,
}

impl Default for NSchedule {
    fn default() -> Self {
        Self { base: 1000, growth: 2 }
    }
}

impl NSchedule {
    pub fn n_max(&self, k: usize) -> usize {
        self.base.saturating_mul(self.growth.saturating_pow(k as u32))
    }
}

/// Rows for `epsilon_k = epsilon0 * shrink^{-k}`, `k = 0..=k_max`.
pub fn scale_sweep(
    c0: Complex64,
    d: u32,
    epsilon0: f64,
    shrink: f64,
    k_max: usize,
    sampler: &Sampler,
    schedule: &NSchedule,
) -> Result<Vec<DensityRow>, DensityError> {
    assert!(shrink > 1.0, "shrink factor must exceed 1");
    (0..=k_max)
        .map(|k| density_at_scale(c0, d, epsilon0 * shrink.powi(-(k as i32)), sampler, schedule.n_max(k), k))
        .collect()
}

pub fn write_density_csv<W: Write>(rows: &[DensityRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
