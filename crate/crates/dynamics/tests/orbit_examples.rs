use approx::assert_abs_diff_eq;
use ce_dynamics::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fam(d: u32, re: f64, im: f64) -> FamilyParams {
    FamilyParams::new(d, c(re, im)).unwrap()
}

/// Integer orbit of a real integer parameter and the exact product
/// `|Df^n(c)| = prod_{j=1}^{n} |d xi_j^{d-1}|`.
fn exact_derivative_moduli(d: u32, c0: i128, n: usize) -> Vec<u128> {
    let mut z: i128 = 0;
    let mut prod: u128 = 1;
    let mut out = vec![1];
    for _ in 0..n {
        z = z.pow(d) + c0;
        prod *= (i128::from(d) * z.pow(d - 1)).unsigned_abs();
        out.push(prod);
    }
    out
}

#[test]
fn step_examples() {
    assert_eq!(step(c(0.0, 0.0), &fam(2, -2.0, 0.0)), c(-2.0, 0.0));
    assert_eq!(step(c(-2.0, 0.0), &fam(2, -2.0, 0.0)), c(2.0, 0.0));
    assert_eq!(step(c(0.0, 1.0), &fam(2, 0.0, 1.0)), c(-1.0, 1.0));
}

#[test]
fn chebyshev_orbit_is_pinned_at_two() {
    let o = critical_orbit(&fam(2, -2.0, 0.0), 10).unwrap();
    assert_eq!(o.escape_index, None);
    assert_eq!(o.length(), 10);
    assert_eq!(o.points[0], c(0.0, 0.0));
    assert_eq!(o.points[1], c(-2.0, 0.0));
    for k in 2..=10 {
        assert_eq!(o.points[k], c(2.0, 0.0));
    }
}

#[test]
fn escape_at_three_for_c_one() {
    let o = critical_orbit(&fam(2, 1.0, 0.0), 10).unwrap();
    assert_eq!(o.escape_index, Some(3));
    assert_eq!(o.length(), 3);
    let re: Vec<f64> = o.points.iter().map(|z| z.re).collect();
    assert_eq!(re, vec![0.0, 1.0, 2.0, 5.0]);
}

#[test]
fn chebyshev_gamma_matches_exact_product() {
    // The exact product gives |Df^n(-2)| = 4^n, so gamma_n = log 4 for every n.
    let exact = exact_derivative_moduli(2, -2, 20);
    let o = critical_orbit(&fam(2, -2.0, 0.0), 40).unwrap();
    for n in 1..=20 {
        assert_eq!(exact[n], 4u128.pow(n as u32));
        let oracle = (exact[n] as f64).ln() / n as f64;
        assert_abs_diff_eq!(o.gamma[n], oracle, epsilon = 1e-12);
    }
    for n in 1..=40 {
        assert_abs_diff_eq!(o.gamma[n], 4f64.ln(), epsilon = 1e-12);
    }
}

#[test]
fn alpha_and_gamma_reproduce_moduli() {
    let o = critical_orbit(&fam(3, 0.1, 0.1), 30).unwrap();
    for k in 1..=o.length() {
        let kf = k as f64;
        assert_abs_diff_eq!((-o.alpha[k] * kf).exp(), o.points[k].norm(), epsilon = 1e-14);
        assert_abs_diff_eq!(o.gamma[k] * kf, o.log_deriv[k], epsilon = 1e-12);
    }
}

#[test]
fn oversized_radius_reports_non_finite_orbit() {
    let p = FamilyParams::with_escape_radius(2, c(1.0, 0.0), f64::MAX).unwrap();
    assert!(matches!(critical_orbit(&p, 100), Err(DynamicsError::NonFiniteOrbit { .. })));
}

#[test]
fn radius_below_certificate_is_rejected() {
    assert!(FamilyParams::with_escape_radius(2, c(-2.0, 0.0), 1.5).is_err());
    assert!(FamilyParams::new(1, c(0.0, 0.0)).is_err());
}

#[test]
fn chain_identity_examples() {
    let o = critical_orbit(&fam(2, -2.0, 0.0), 10).unwrap();
    assert!(chain_identity_residual(&o, 5) < 1e-12);
    let o = critical_orbit(&fam(3, 0.1, 0.1), 30).unwrap();
    assert!(chain_identity_residual(&o, 20) < 1e-10);
    let o = critical_orbit(&fam(2, 0.0, 1.0), 40).unwrap();
    assert!(chain_identity_residual(&o, 30) < 1e-10);
}

#[test]
fn degenerate_orbit_uses_sentinels() {
    let o = critical_orbit(&fam(2, 0.0, 0.0), 10).unwrap();
    assert_eq!(o.first_zero(), Some(1));
    assert_eq!(o.alpha[3], f64::INFINITY);
    assert_eq!(o.gamma[3], f64::NEG_INFINITY);
    assert_eq!(chain_identity_residual(&o, 4), 0.0);
    let s = lyapunov_summary(&o, 0.5);
    assert_eq!(s.gamma_lower, f64::NEG_INFINITY);
}

#[test]
fn ce_window_examples() {
    let o = critical_orbit(&fam(2, -2.0, 0.0), 40).unwrap();
    assert!(ce_window_test(&o, 1.0, 2, 40).unwrap());
    assert!(!ce_window_test(&o, 1.39, 2, 40).unwrap());
    assert!(matches!(
        ce_window_test(&o, 1.0, 2, 41),
        Err(DynamicsError::WindowBeyondOrbit { n_hi: 41, length: 40 })
    ));
    for (re, im) in [(0.3, 0.0), (0.6, 0.2), (-2.0, 0.0)] {
        let o = critical_orbit(&fam(2, re, im), 5).unwrap();
        let single = 2.0 * c(re, im).norm() >= 1.0;
        assert_eq!(ce_window_test(&o, 0.0, 1, 1).unwrap(), single);
    }
}

#[test]
fn transversality_chebyshev_limit() {
    let t = transversality_ratio(&fam(2, -2.0, 0.0), 60, 1e-15).unwrap();
    assert!(t.converged);
    assert!(t.n_used <= 60);
    // 1 - sum 4^{-n} = 2/3
    assert_abs_diff_eq!(t.estimate.re, 2.0 / 3.0, epsilon = 1e-9);
    assert_abs_diff_eq!(t.estimate.im, 0.0, epsilon = 1e-12);
}

#[test]
fn transversality_base_case() {
    let t = transversality_ratio(&fam(2, -2.0, 0.0), 1, 1e-12).unwrap();
    assert_eq!(t.estimate, c(1.0, 0.0));
    assert_eq!(t.n_used, 1);
}

#[test]
fn transversality_at_i_agrees_with_long_run() {
    let short = transversality_ratio(&fam(2, 0.0, 1.0), 200, 1e-13).unwrap();
    let long = transversality_ratio(&fam(2, 0.0, 1.0), 2000, 1e-16).unwrap();
    assert!(short.converged);
    assert!(short.estimate.norm() > 0.1 && short.estimate.norm().is_finite());
    assert!((short.estimate - long.estimate).norm() < 1e-10);
}

#[test]
fn transversality_rejects_superattracting_parameter() {
    // c = -1: 0 -> -1 -> 0
    let r = transversality_ratio(&fam(2, -1.0, 0.0), 50, 1e-12);
    assert_eq!(r, Err(DynamicsError::DerivativeVanished { k: 2 }));
}

#[test]
fn parameter_derivative_at_chebyshev() {
    let p = fam(2, -2.0, 0.0);
    assert_eq!(parameter_derivative(&p, 1), c(1.0, 0.0));
    assert_eq!(parameter_derivative(&p, 2), c(-3.0, 0.0));
    assert_eq!(parameter_derivative(&p, 3), c(-11.0, 0.0));
}

#[test]
fn distortion_examples() {
    let b = fam(2, -2.0, 0.0);
    assert_eq!(distortion_sum(c(-2.0, 0.0), &b, 50).unwrap(), 0.0);
    let i = fam(2, 0.0, 1.0);
    assert_eq!(distortion_sum(c(0.0, 1.0), &i, 100).unwrap(), 0.0);

    // Oracle: direct double-precision orbit differences.
    let a = c(-2.0, 0.0);
    let bp = fam(2, -2.0 + 1e-12, 0.0);
    let pa = fam(2, -2.0, 0.0);
    let (mut za, mut zb, mut expected) = (c(0.0, 0.0), c(0.0, 0.0), 0.0);
    let mut first = None;
    for _ in 1..5 {
        za = za * za + pa.c;
        zb = zb * zb + bp.c;
        let term = (za - zb).norm() / zb.norm();
        first.get_or_insert(term);
        expected += term;
    }
    assert_abs_diff_eq!(first.unwrap(), 5e-13, epsilon = 1e-15);
    let got = distortion_sum(a, &bp, 5).unwrap();
    assert_abs_diff_eq!(got, expected, epsilon = 1e-20);
}

#[test]
fn distortion_rejects_critical_reference() {
    let b = fam(2, -1.0, 0.0);
    assert_eq!(
        distortion_sum(c(-1.001, 0.0), &b, 5),
        Err(DynamicsError::OrbitHitsCritical { j: 2 })
    );
}

#[test]
fn lyapunov_chebyshev() {
    let o = critical_orbit(&fam(2, -2.0, 0.0), 1000).unwrap();
    let s = lyapunov_summary(&o, 0.5);
    assert_abs_diff_eq!(s.gamma_lower, 4f64.ln(), epsilon = 1e-2);
    assert_abs_diff_eq!(s.gamma_upper, 4f64.ln(), epsilon = 1e-2);
    assert!(s.gamma_upper <= s.gamma_bar_trivial + 1e-12);
    assert_abs_diff_eq!(s.gamma_bar_trivial, 4f64.ln(), epsilon = 1e-12);
}

#[test]
fn lyapunov_at_i_matches_long_run() {
    let p = fam(2, 0.0, 1.0);
    let s = lyapunov_summary(&critical_orbit(&p, 1000).unwrap(), 0.5);
    let long = lyapunov_summary(&critical_orbit(&p, 100_000).unwrap(), 0.5);
    assert!(s.gamma_lower > 0.0 && s.gamma_lower.is_finite());
    assert!((s.gamma_lower - long.gamma_lower).abs() < 1e-2);
    assert!(s.gamma_lower <= s.gamma_upper && s.gamma_upper <= s.gamma_bar_trivial);
}

#[test]
fn gamma_bar_by_degree() {
    for d in 2..=5u32 {
        let exact = f64::from(d).ln() + f64::from(d - 1) * 2f64.ln();
        assert_abs_diff_eq!(gamma_bar_trivial(d), exact, epsilon = 1e-12);
    }
}
