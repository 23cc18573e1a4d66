use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::{step, DynamicsError, FamilyParams};

/// Consecutive small increments required before declaring convergence.
const STREAK: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transversality {
    /// Last ratio `rho_n = xi'_n / Df^{n-1}(c)`.
    pub estimate: Complex64,
    /// The `n` of `estimate`.
    pub n_used: usize,
    pub converged: bool,
}

/// Limit of `xi'_n(c) / Df^{n-1}(c)` by the telescoping sum
/// `rho_{n+1} = rho_n + 1 / Df^n(c)`, `rho_1 = 1`.
///
/// `1/Df^n` is rebuilt each step from a running log-modulus and phase, so the
/// sum survives orbits whose derivative leaves double range.
pub fn transversality_ratio(
    params: &FamilyParams,
    n_max: usize,
    tol: f64,
) -> Result<Transversality, DynamicsError> {
    let log_d = params.log_d();
    let dm1 = f64::from(params.d - 1);
    let mut rho = Complex64::new(1.0, 0.0);
    let mut log_mod = 0.0;
    let mut phase = 0.0;
    let mut z = params.c;
    let mut streak = 0;
    let mut n_used = 1;
    for n in 1..n_max {
        if z == Complex64::new(0.0, 0.0) {
            return Err(DynamicsError::DerivativeVanished { k: n });
        }
        log_mod += log_d + dm1 * z.norm().ln();
        let inv_mag = (-log_mod).exp();
        let term = if inv_mag == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            phase = (phase + dm1 * z.arg()).rem_euclid(TAU);
            Complex64::from_polar(inv_mag, -phase)
        };
        if term.norm() < tol * rho.norm() {
            streak += 1;
        } else {
            streak = 0;
        }
        rho += term;
        n_used = n + 1;
        if streak >= STREAK {
            return Ok(Transversality { estimate: rho, n_used, converged: true });
        }
        z = step(z, params);
    }
    Ok(Transversality { estimate: rho, n_used, converged: false })
}
