use ce_dynamics::{critical_orbit, Complex64, FamilyParams, OrbitRecord};
use ce_partition::{sample_points, Geometry, SampleOrbits};
use ce_returns::{bound_period, BoundError};

use crate::ExclusionError;

/// Full critical orbits of one square's sample parameters, up to the run budget.
#[derive(Debug, Clone)]
pub(crate) struct SquareOrbits {
    pub orbits: Vec<OrbitRecord>,
}

impl SquareOrbits {
    pub fn new(d: u32, center: Complex64, side: f64, grid: usize, n_max: usize) -> Result<Self, ExclusionError> {
        let orbits = sample_points(center, side, grid)
            .into_iter()
            .map(|c| {
                let p = FamilyParams::new(d, c)?;
                Ok(critical_orbit(&p, n_max)?)
            })
            .collect::<Result<Vec<_>, ExclusionError>>()?;
        Ok(Self { orbits })
    }

    pub fn center(&self) -> &OrbitRecord {
        &self.orbits[SampleOrbits::CENTER]
    }

    /// Some sample has left its escape radius at or before `t`.
    pub fn escaped_by(&self, t: usize) -> bool {
        self.orbits.iter().any(|o| o.escape_index.is_some_and(|e| e <= t))
    }

    pub fn geometry(&self, t: usize) -> Geometry {
        let images: Vec<Complex64> = self.orbits.iter().map(|o| o.point(t)).collect();
        Geometry::from_images(&images, t)
    }

    pub fn sup_alpha(&self, t: usize) -> f64 {
        self.orbits.iter().map(|o| o.alpha[t]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf_gamma(&self, t: usize) -> f64 {
        self.orbits.iter().map(|o| o.gamma[t]).fold(f64::INFINITY, f64::min)
    }

    /// Set-level bound period: the shortest binding stretch over the samples.
    /// A stretch cut short by a sample escaping ends there; `truncated` means
    /// some sample still binds at the budget.
    pub fn bound_period(&self, t: usize, beta: f64, n_max: usize) -> (usize, bool) {
        let mut p = usize::MAX;
        let mut truncated = false;
        for o in &self.orbits {
            let this = match bound_period(o, t, beta, n_max - t) {
                Ok(p) => p,
                Err(BoundError::Truncated { p_so_far }) => {
                    if o.escape_index.is_none() {
                        truncated = true;
                    }
                    p_so_far
                }
            };
            p = p.min(this);
        }
        (p, truncated && p + t >= n_max)
    }
}
