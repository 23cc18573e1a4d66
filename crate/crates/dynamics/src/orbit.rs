use num_complex::Complex64;

use crate::{step, DynamicsError, FamilyParams};

/// Critical orbit `xi_k = f_c^k(0)` with its exponent profiles.
///
/// Every vector is indexed by `k`. Entry 0 of `log_deriv`, `alpha` and
/// `gamma` is a placeholder (0.0); the profiles start at `k = 1`.
/// A point that is exactly 0 gives `alpha = +inf` and `log_deriv = -inf`
/// from that index on.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub params: FamilyParams,
    pub points: Vec<Complex64>,
    /// `L_k = log |Df^k(c)|`.
    pub log_deriv: Vec<f64>,
    /// `alpha_k = -log|xi_k| / k`.
    pub alpha: Vec<f64>,
    /// `gamma_k = L_k / k`.
    pub gamma: Vec<f64>,
    /// First `k` with `|xi_k| > escape_radius`; the record stops there.
    pub escape_index: Option<usize>,
}

impl OrbitRecord {
    /// Index of the last stored point.
    pub fn length(&self) -> usize {
        self.points.len() - 1
    }

    pub fn point(&self, k: usize) -> Complex64 {
        self.points[k]
    }

    /// First `k >= 1` with `xi_k == 0`, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.points.iter().skip(1).position(|z| *z == Complex64::new(0.0, 0.0)).map(|i| i + 1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.first_zero().is_some()
    }
}

pub fn critical_orbit(params: &FamilyParams, n_max: usize) -> Result<OrbitRecord, DynamicsError> {
    assert!(n_max >= 1, "n_max must be at least 1");
    let log_d = params.log_d();
    let dm1 = f64::from(params.d - 1);
    let mut rec = OrbitRecord {
        params: *params,
        points: Vec::with_capacity(n_max + 1),
        log_deriv: Vec::with_capacity(n_max + 1),
        alpha: Vec::with_capacity(n_max + 1),
        gamma: Vec::with_capacity(n_max + 1),
        escape_index: None,
    };
    let mut z = Complex64::new(0.0, 0.0);
    rec.points.push(z);
    rec.log_deriv.push(0.0);
    rec.alpha.push(0.0);
    rec.gamma.push(0.0);
    let mut big_l = 0.0;
    for k in 1..=n_max {
        z = step(z, params);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(DynamicsError::NonFiniteOrbit { k });
        }
        let modulus = z.norm();
        let log_mod = modulus.ln();
        big_l += log_d + dm1 * log_mod;
        let kf = k as f64;
        rec.points.push(z);
        rec.log_deriv.push(big_l);
        rec.alpha.push(-log_mod / kf);
        rec.gamma.push(big_l / kf);
        if modulus > params.escape_radius {
            rec.escape_index = Some(k);
            break;
        }
    }
    Ok(rec)
}

/// `|gamma_n n - gamma_{n-1}(n-1) - log d + alpha_n n (d-1)|`.
///
/// Once the orbit has passed through 0 both sides are `-inf`; the
/// identity then holds trivially and 0 is returned.
pub fn chain_identity_residual(orbit: &OrbitRecord, n: usize) -> f64 {
    assert!(n >= 1 && n <= orbit.length(), "n = {n} outside 1..={}", orbit.length());
    let nf = n as f64;
    let prev = if n == 1 { 0.0 } else { orbit.gamma[n - 1] * (nf - 1.0) };
    let dm1 = f64::from(orbit.params.d - 1);
    let r = (orbit.gamma[n] * nf - prev - orbit.params.log_d() + orbit.alpha[n] * nf * dm1).abs();
    if r.is_nan() && orbit.first_zero().is_some_and(|z| z <= n) {
        return 0.0;
    }
    r
}

/// True iff `L_k >= gamma k` for every `k` in `[n_lo, n_hi]`.
pub fn ce_window_test(
    orbit: &OrbitRecord,
    gamma: f64,
    n_lo: usize,
    n_hi: usize,
) -> Result<bool, DynamicsError> {
    assert!(n_lo >= 1, "window must start at k >= 1");
    if n_hi > orbit.length() {
        return Err(DynamicsError::WindowBeyondOrbit { n_hi, length: orbit.length() });
    }
    Ok((n_lo..=n_hi).all(|k| orbit.log_deriv[k] >= gamma * k as f64))
}

/// Parameter derivative `d xi_k / dc`, via `xi'_{j+1} = d xi_j^{d-1} xi'_j + 1`.
pub fn parameter_derivative(params: &FamilyParams, k: usize) -> Complex64 {
    let d = params.d;
    let mut z = Complex64::new(0.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);
    for _ in 0..k {
        dz = z.powu(d - 1) * f64::from(d) * dz + 1.0;
        z = step(z, params);
    }
    dz
}
