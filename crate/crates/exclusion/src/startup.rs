use ce_dynamics::{distortion_sum, Complex64, FamilyParams};
use ce_partition::{classify_return_set, compliant_at, SampleOrbits};
use ce_returns::{CriticalNeighborhoods, ReturnKind};
use serde::Serialize;

use crate::orbits::SquareOrbits;
use crate::ExclusionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartupStatus {
    EssentialReturn,
    LargeScale,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartupReport {
    pub n: usize,
    pub status: StartupStatus,
    /// Sampled image geometry at N; absent when a sample escaped.
    pub diam: Option<f64>,
    pub dist: Option<f64>,
    /// The large-scale exit was triggered by a sample leaving its escape radius.
    pub sample_escaped: bool,
    /// Smallest sampled `gamma_{N-1}`.
    pub min_gamma_before_n: Option<f64>,
    /// Largest `sum_j |xi_j(corner) - xi_j(center)| / |xi_j(center)|` up to N.
    pub max_distortion_sum: Option<f64>,
    /// Largest `| |Df^k(c)| / |Df^k(c0)| - 1 |` over samples and `k <= N`.
    pub max_derivative_ratio_dev: f64,
    /// Smallest `K` with `K^{-1} |xi_k(c)| <= |xi_k(c0)| <= K |xi_k(c)|` for `k < N`.
    pub comparability_k: f64,
}

/// Iterates the unsplit root square until its image is an essential return
/// into `U` or reaches the large scale.
pub fn startup(
    d: u32,
    center: Complex64,
    side: f64,
    nbhd: &CriticalNeighborhoods,
    grid: usize,
    n_budget: usize,
) -> Result<StartupReport, ExclusionError> {
    let so = SquareOrbits::new(d, center, side, grid, n_budget)?;
    let s = nbhd.large_scale();
    for k in 1..=n_budget {
        let escaped = so.escaped_by(k);
        let g = (!escaped).then(|| so.geometry(k));
        let status = match g {
            None => Some(StartupStatus::LargeScale),
            Some(g) if g.diam >= s => Some(StartupStatus::LargeScale),
            Some(g) if g.dist <= nbhd.delta() && classify_return_set(&g) == ReturnKind::EssentialSet => {
                Some(StartupStatus::EssentialReturn)
            }
            Some(g) if !compliant_at(&g, nbhd) => {
                return Err(ExclusionError::StartupFailed {
                    k,
                    reason: "square stopped being a partition element".into(),
                });
            }
            Some(_) => None,
        };
        if let Some(status) = status {
            return Ok(report(&so, d, k, status, g, escaped));
        }
    }
    Err(ExclusionError::StartupFailed { k: n_budget, reason: "budget exhausted".into() })
}

fn report(
    so: &SquareOrbits,
    d: u32,
    n: usize,
    status: StartupStatus,
    g: Option<ce_partition::Geometry>,
    sample_escaped: bool,
) -> StartupReport {
    let c0 = so.center();
    let last_alive = |o: &ce_dynamics::OrbitRecord| o.length().min(n);
    let min_gamma_before_n = (n >= 2).then(|| so.inf_gamma(n - 1));
    let mut ratio_dev: f64 = 0.0;
    let mut log_k: f64 = 0.0;
    for o in &so.orbits {
        for k in 1..=last_alive(o).min(c0.length()) {
            let diff = o.log_deriv[k] - c0.log_deriv[k];
            if diff.is_finite() {
                ratio_dev = ratio_dev.max((diff.exp() - 1.0).abs());
            }
            if k < n {
                let lr = o.point(k).norm().ln() - c0.point(k).norm().ln();
                if lr.is_finite() {
                    log_k = log_k.max(lr.abs());
                }
            }
        }
    }
    let max_distortion_sum = FamilyParams::new(d, c0.params.c).ok().and_then(|center| {
        so.orbits[..SampleOrbits::CENTER]
            .iter()
            .map(|o| distortion_sum(o.params.c, &center, n).ok())
            .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))
    });
    StartupReport {
        n,
        status,
        diam: g.map(|g| g.diam),
        dist: g.map(|g| g.dist),
        sample_escaped,
        min_gamma_before_n,
        max_distortion_sum,
        max_derivative_ratio_dev: ratio_dev,
        comparability_k: log_k.exp(),
    }
}
