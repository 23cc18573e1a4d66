use num_complex::Complex64;

use crate::{step, DynamicsError, FamilyParams};

/// `Upsilon = sum_{j=1}^{n-1} |xi_j(a) - xi_j(b)| / |xi_j(b)|`, with `b` the
/// reference parameter described by `params_b`.
pub fn distortion_sum(
    a: Complex64,
    params_b: &FamilyParams,
    n: usize,
) -> Result<f64, DynamicsError> {
    let params_a = FamilyParams::new(params_b.d, a)?;
    let mut za = Complex64::new(0.0, 0.0);
    let mut zb = Complex64::new(0.0, 0.0);
    let mut sum = 0.0;
    for j in 1..n {
        za = step(za, &params_a);
        zb = step(zb, params_b);
        if za.norm() > params_a.escape_radius || zb.norm() > params_b.escape_radius {
            return Err(DynamicsError::EscapedEarly { k: j });
        }
        let mb = zb.norm();
        if mb == 0.0 {
            return Err(DynamicsError::OrbitHitsCritical { j });
        }
        sum += (za - zb).norm() / mb;
    }
    Ok(sum)
}
