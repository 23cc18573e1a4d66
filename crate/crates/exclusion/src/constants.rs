use serde::Serialize;

use crate::ExclusionError;

/// Measured and chosen inputs to `derive_constants`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsInput {
    pub gamma_under: f64,
    pub gamma_bar: f64,
    pub gamma_h: f64,
    pub alpha_nu0: f64,
    pub d: u32,
    /// Default `(1 + kappa) / 2`.
    pub kappa_prime: Option<f64>,
    /// Default `(1 + kappa') / 2`.
    pub kappa_tilde: Option<f64>,
    pub c_tilde: f64,
    pub c1: f64,
    /// Post-promotion recurrence target; default is the cap.
    pub alpha: Option<f64>,
}

impl ConstantsInput {
    pub fn new(gamma_under: f64, gamma_bar: f64, gamma_h: f64, alpha_nu0: f64, d: u32) -> Self {
        Self {
            gamma_under,
            gamma_bar,
            gamma_h,
            alpha_nu0,
            d,
            kappa_prime: None,
            kappa_tilde: None,
            c_tilde: 0.05,
            c1: 1.1,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConstants {
    pub d: u32,
    pub gamma_under: f64,
    pub gamma_bar: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub kappa_tilde: f64,
    pub gamma_h: f64,
    pub alpha_nu0: f64,
    pub gamma_i: f64,
    pub kappa_hat: f64,
    pub gamma_c: f64,
    pub c1: f64,
    pub c_tilde: f64,
    pub alpha_cap: f64,
    pub alpha: f64,
    pub m_tilde: f64,
    pub iota: f64,
}

pub fn kappa(gamma_under: f64, gamma_bar: f64) -> f64 {
    1.0 - gamma_under / (4.0 * gamma_bar)
}

/// Lower exponent through the promotion period.
pub fn gamma_i(gamma_under: f64, gamma_h: f64, kappa_prime: f64, alpha_nu0: f64, d: u32) -> f64 {
    let g = gamma_under * (1.0 - kappa_prime);
    gamma_under.min(gamma_h) * g / (2.0 * alpha_nu0 * f64::from(d) + g)
}

pub fn kappa_hat(gamma_i: f64, gamma_bar: f64) -> f64 {
    1.0 - gamma_i / (4.0 * gamma_bar)
}

pub fn gamma_c(gamma_i: f64, gamma_h: f64, d: u32) -> f64 {
    (gamma_i / (12.0 * f64::from(d))).min(gamma_h)
}

pub fn m_tilde(d: u32, gamma_bar: f64, gamma_c: f64) -> f64 {
    16.0 * f64::from(d) * gamma_bar / (gamma_c * gamma_c)
}

/// Largest admissible `alpha`: `gamma_I * min(1/(16d), gamma_C^3/(1000 d gamma_bar^2))`.
pub fn alpha_cap(gamma_i: f64, gamma_c: f64, gamma_bar: f64, d: u32) -> f64 {
    let df = f64::from(d);
    gamma_i * (1.0 / (16.0 * df)).min(gamma_c.powi(3) / (1000.0 * df * gamma_bar * gamma_bar))
}

pub fn iota(m_tilde: f64, kappa_hat: f64, alpha: f64) -> f64 {
    10.0 * m_tilde * ((3.0 + kappa_hat) / (1.0 - kappa_hat)) * alpha
}

fn invalid(inequality: &'static str, detail: String) -> ExclusionError {
    ExclusionError::InvalidConstants { inequality, detail }
}

pub fn derive_constants(inp: &ConstantsInput) -> Result<RunConstants, ExclusionError> {
    let ConstantsInput { gamma_under, gamma_bar, gamma_h, alpha_nu0, d, c_tilde, c1, .. } = *inp;
    if !(gamma_under > 0.0 && gamma_under <= gamma_bar) {
        return Err(invalid("0 < gamma_under <= gamma_bar", format!("{gamma_under} vs {gamma_bar}")));
    }
    if !(gamma_h > 0.0) {
        return Err(invalid("gamma_H > 0", format!("{gamma_h}")));
    }
    if !(alpha_nu0 >= 0.0 && alpha_nu0.is_finite()) {
        return Err(invalid("alpha_nu0 >= 0", format!("{alpha_nu0}")));
    }
    let kappa = kappa(gamma_under, gamma_bar);
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(invalid("0 < kappa < 1", format!("{kappa}")));
    }
    let kappa_prime = inp.kappa_prime.unwrap_or((1.0 + kappa) / 2.0);
    if !(kappa < kappa_prime && kappa_prime < 1.0) {
        return Err(invalid("kappa < kappa' < 1", format!("kappa={kappa}, kappa'={kappa_prime}")));
    }
    let kappa_tilde = inp.kappa_tilde.unwrap_or((1.0 + kappa_prime) / 2.0);
    if !(kappa_prime < kappa_tilde && kappa_tilde < 1.0) {
        return Err(invalid("kappa' < kappa~ < 1", format!("kappa'={kappa_prime}, kappa~={kappa_tilde}")));
    }
    if !(c_tilde > 0.0) {
        return Err(invalid("C~ > 0", format!("{c_tilde}")));
    }
    if !(c1 >= 1.0) {
        return Err(invalid("C1 >= 1", format!("{c1}")));
    }
    let gamma_i = gamma_i(gamma_under, gamma_h, kappa_prime, alpha_nu0, d);
    let kappa_hat = kappa_hat(gamma_i, gamma_bar);
    let gamma_c = gamma_c(gamma_i, gamma_h, d);
    let m_tilde = m_tilde(d, gamma_bar, gamma_c);
    let alpha_cap = alpha_cap(gamma_i, gamma_c, gamma_bar, d);
    let alpha = inp.alpha.unwrap_or(alpha_cap);
    if !(alpha > 0.0 && alpha <= alpha_cap) {
        return Err(invalid(
            "alpha/gamma_I cap",
            format!("alpha={alpha:e} must lie in (0, {alpha_cap:e}]"),
        ));
    }
    let iota = iota(m_tilde, kappa_hat, alpha);
    if !(iota <= 1.0) {
        return Err(invalid("iota <= 1", format!("{iota}")));
    }
    Ok(RunConstants {
        d,
        gamma_under,
        gamma_bar,
        kappa,
        kappa_prime,
        kappa_tilde,
        gamma_h,
        alpha_nu0,
        gamma_i,
        kappa_hat,
        gamma_c,
        c1,
        c_tilde,
        alpha_cap,
        alpha,
        m_tilde,
        iota,
    })
}
