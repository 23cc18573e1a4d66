use num_complex::Complex64;

use crate::DynamicsError;

/// One member `z^d + c` of the unicritical family, with its escape radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub d: u32,
    pub c: Complex64,
    pub escape_radius: f64,
}

/// `max(|c|, 2^{1/(d-1)})`: beyond it `|f(z)| > |z|`, so a strict exceedance certifies escape.
pub fn default_escape_radius(d: u32, c: Complex64) -> f64 {
    let base = 2f64.powf(1.0 / f64::from(d - 1));
    c.norm().max(base)
}

impl FamilyParams {
    /// Uses the default escape radius.
    pub fn new(d: u32, c: Complex64) -> Result<Self, DynamicsError> {
        if d < 2 {
            return Err(DynamicsError::InvalidDegree(d));
        }
        Ok(Self { d, c, escape_radius: default_escape_radius(d, c) })
    }

    pub fn with_escape_radius(d: u32, c: Complex64, radius: f64) -> Result<Self, DynamicsError> {
        let mut p = Self::new(d, c)?;
        if !(radius >= p.escape_radius) {
            return Err(DynamicsError::InvalidEscapeRadius { radius, minimum: p.escape_radius });
        }
        p.escape_radius = radius;
        Ok(p)
    }

    pub fn log_d(&self) -> f64 {
        f64::from(self.d).ln()
    }
}

/// `z^d + c`, with the power taken by binary exponentiation.
#[inline]
pub fn step(z: Complex64, params: &FamilyParams) -> Complex64 {
    z.powu(params.d) + params.c
}
