use approx::assert_relative_eq;
use ce_dynamics::{critical_orbit, Complex64, FamilyParams};
use ce_exclusion::*;
use ce_partition::SquareStatus;
use ce_returns::CriticalNeighborhoods;

const ANCHOR: f64 = -1.99998588181320168;

fn config(c0: Complex64, epsilon: f64) -> RunConfig {
    RunConfig {
        c0,
        d: 2,
        epsilon,
        nbhd: CriticalNeighborhoods::default(),
        n_max: 10_000,
        depth_limit: 48,
        grid: 3,
        choices: ConstantChoices::default(),
        gamma_h: 0.6,
    }
}

fn anchor_config() -> RunConfig {
    config(Complex64::new(ANCHOR, 0.0), 3e-11)
}

/// A slowly recurrent real parameter whose square meets an inessential and
/// then an essential return at set level.
fn recurrent_config() -> RunConfig {
    let mut cfg = config(Complex64::new(-1.60434786802118756, 0.0), 1e-13);
    cfg.n_max = 3000;
    cfg
}

#[test]
fn kappa_example() {
    assert_eq!(kappa(0.6, 1.2), 0.875);
    let k = derive_constants(&ConstantsInput::new(0.6, 1.2, 0.6, 0.3, 2)).unwrap();
    assert_eq!(k.kappa, 0.875);
    assert_eq!(k.kappa_prime, 0.9375);
}

#[test]
fn gamma_i_example() {
    assert_relative_eq!(gamma_i(0.6, 0.6, 0.9, 0.3, 2), 0.6 * 0.06 / 1.26, max_relative = 1e-14);
    assert!((gamma_i(0.6, 0.6, 0.9, 0.3, 2) - 0.02857).abs() < 1e-5);
}

#[test]
fn m_tilde_example() {
    assert_relative_eq!(m_tilde(2, 1.3863, 0.01), 443_616.0, max_relative = 1e-14);
}

#[test]
fn derived_constants_satisfy_their_invariants() {
    let k = derive_constants(&ConstantsInput::new(0.6, 1.2, 0.6, 0.3, 2)).unwrap();
    assert!(k.kappa < k.kappa_prime && k.kappa_prime < k.kappa_tilde && k.kappa_tilde < 1.0);
    assert_eq!(k.kappa_hat, 1.0 - k.gamma_i / (4.0 * k.gamma_bar));
    assert_eq!(k.gamma_c, (k.gamma_i / 24.0).min(k.gamma_h));
    assert!(k.alpha <= k.alpha_cap && k.iota <= 1.0);
}

#[test]
fn alpha_over_cap_is_rejected_by_name() {
    let mut inp = ConstantsInput::new(0.6, 1.2, 0.6, 0.3, 2);
    inp.alpha = Some(1e-3);
    match derive_constants(&inp) {
        Err(ExclusionError::InvalidConstants { inequality, .. }) => assert_eq!(inequality, "alpha/gamma_I cap"),
        other => panic!("{other:?}"),
    }
    inp.alpha = None;
    inp.kappa_prime = Some(0.8);
    assert!(matches!(derive_constants(&inp), Err(ExclusionError::InvalidConstants { inequality: "kappa < kappa' < 1", .. })));
}

#[test]
fn alpha_tilde_example() {
    let a = next_alpha_tilde(0.9, 1000, 1400, 0.05);
    assert_relative_eq!(a, 0.9 * 1000.0 / 1400.0 * 0.05, max_relative = 1e-15);
    assert!((a - 0.03214).abs() < 1e-5);
}

#[test]
fn gamma_under_example() {
    let g = next_gamma_under(0.02, 0.6, 200, 1000, 1400);
    assert_relative_eq!(g, (0.02 + 0.6 * 0.2) * 1000.0 / 1399.0, max_relative = 1e-15);
    assert!((g - 0.1001).abs() < 1e-4);
}

fn ledger(alpha: &[f64], gamma: &[f64]) -> PromotionLedger {
    PromotionLedger { alpha_tilde: alpha.to_vec(), gamma_under: gamma.to_vec(), ..Default::default() }
}

#[test]
fn promotion_end_examples() {
    assert_eq!(promotion_end(&ledger(&[0.05, 0.03, 0.004], &[0.02, 0.05, 0.10]), 0.1), Some(2));
    assert_eq!(promotion_end(&ledger(&[0.001, 0.03], &[0.02, 0.05]), 0.1), Some(0));
    assert_eq!(promotion_end(&ledger(&[0.05, 0.03], &[0.02, 0.05]), 0.1), None);
}

#[test]
fn startup_at_chebyshev_reaches_large_scale() {
    let nb = CriticalNeighborhoods::default();
    let st = startup(2, Complex64::new(-2.0, 0.0), 1e-3, &nb, 3, 200).unwrap();
    assert_eq!(st.status, StartupStatus::LargeScale);
    assert!(st.n <= 3, "N = {}", st.n);
    // Direct corner iteration: growth by about 4 per step until diam >= S.
    let corners = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)].map(|(x, y)| Complex64::new(-2.0 + 5e-4 * x, 5e-4 * y));
    let s = nb.large_scale();
    let first = (1..).find(|&k| {
        let pts: Vec<Complex64> = corners
            .iter()
            .map(|&c| critical_orbit(&FamilyParams::new(2, c).unwrap(), k).unwrap().point(k))
            .collect();
        pts.iter().any(|a| pts.iter().any(|b| (a - b).norm() >= s))
    });
    assert_eq!(Some(st.n), first);
}

#[test]
fn startup_exits_immediately_for_a_large_square() {
    let nb = CriticalNeighborhoods::default();
    let st = startup(2, Complex64::new(0.3, 0.2), 1e-3, &nb, 3, 100).unwrap();
    assert!(1e-3 >= nb.large_scale());
    assert_eq!((st.n, st.status), (1, StartupStatus::LargeScale));
}

#[test]
fn startup_at_anchor_is_an_essential_return_at_ten() {
    let cfg = anchor_config();
    let st = startup(2, cfg.c0, cfg.epsilon, &cfg.nbhd, 3, 1000).unwrap();
    assert_eq!((st.n, st.status), (10, StartupStatus::EssentialReturn));
    // The center parameter's own timeline has its first return at 10.
    let orbit = critical_orbit(&FamilyParams::new(2, cfg.c0).unwrap(), 1000).unwrap();
    let events = ce_returns::timeline(&orbit, &cfg.nbhd, 1000);
    assert_eq!(events[0].n, 10);
}

#[test]
fn anchor_run_has_no_initial_deletion() {
    let out = run(&anchor_config()).unwrap();
    let init = out.initial.unwrap();
    assert_eq!(init.deleted_fraction, 0.0);
    assert!(init.deleted_fraction <= 4.0 * init.predicted_bound);
    assert_eq!(out.summary.delta0, 0.0);
}

/// With C1 = 1 every leaf whose center has `alpha_N(c) > alpha_N(c0)` goes,
/// and nothing else does.
#[test]
fn initial_deletion_with_unit_ratio() {
    let mut cfg = anchor_config();
    cfg.choices.c1 = 1.0;
    let out = run(&cfg).unwrap();
    let n = out.startup.n;
    let alpha_n = |c: Complex64| {
        let o = critical_orbit(&FamilyParams::new(2, c).unwrap(), n).unwrap();
        o.alpha[n]
    };
    let a0 = alpha_n(cfg.c0);
    let mut deleted = 0;
    for l in &out.leaves {
        let a = alpha_n(Complex64::new(l.center_re, l.center_im));
        match l.status {
            SquareStatus::DeletedAlpha => {
                deleted += 1;
                assert!(a > a0);
            }
            _ => assert!(a <= a0, "{l:?}"),
        }
    }
    assert!(deleted > 0);
    // Fine-grid measurement of the level set {alpha_N > alpha_N(c0)}.
    let m = 400;
    let mut above = 0;
    for i in 0..m {
        for j in 0..m {
            let c = cfg.c0
                + Complex64::new(
                    cfg.epsilon * ((i as f64 + 0.5) / m as f64 - 0.5),
                    cfg.epsilon * ((j as f64 + 0.5) / m as f64 - 0.5),
                );
            if alpha_n(c) > a0 {
                above += 1;
            }
        }
    }
    let fine = above as f64 / (m * m) as f64;
    assert!((out.summary.delta0 - fine).abs() < 0.1, "leafwise {} vs fine {fine}", out.summary.delta0);
}

#[test]
fn anchor_run_escapes_without_violations() {
    let out = run(&anchor_config()).unwrap();
    let s = &out.summary;
    assert_eq!(s.startup_n, 10);
    assert_eq!(s.leaves, 64);
    assert_eq!(s.escaped_fraction, 1.0);
    assert_eq!(s.inessential_deletions, 0);
    assert_eq!(s.deletion_bound_violations, 0);
    assert_eq!(s.q_violations, 0);
    assert_eq!(s.q_checked, 64);
    assert!(out.leaves.iter().all(|l| l.escape_time == Some(20)));
}

#[test]
fn exterior_anchor_escapes_trivially() {
    let out = run(&config(Complex64::new(3.0, 0.0), 0.01)).unwrap();
    assert_eq!(out.startup.status, StartupStatus::LargeScale);
    assert!(out.constants.is_none());
    assert_eq!(out.summary.escaped_fraction, 1.0);
    assert_eq!(out.summary.product, 1.0);
}

#[test]
fn inessential_returns_delete_nothing() {
    let out = run(&recurrent_config()).unwrap();
    let ines: Vec<_> = out.returns.iter().filter(|r| r.kind.starts_with("inessential")).collect();
    let ess: Vec<_> = out.returns.iter().filter(|r| r.kind == "essential_u").collect();
    assert!(!ines.is_empty() && !ess.is_empty());
    assert!(ines.iter().all(|r| r.deleted_fraction == 0.0));
    assert_eq!(out.summary.inessential_deletions, 0);
}

#[test]
fn ledgers_replay_bit_identically() {
    let out = run(&recurrent_config()).unwrap();
    let k = out.constants.unwrap();
    let mut checked = 0;
    for &i in &out.tree.leaves() {
        let l = &out.tree.node(i).ledger.ledger;
        let (a, g) = replay(l, &k);
        assert_eq!(a, l.alpha_tilde);
        assert_eq!(g, l.gamma_under);
        checked += usize::from(l.nu.len() > 1);
    }
    assert!(checked > 0);
}

#[test]
fn promotion_starts_from_the_startup_time() {
    let out = run(&recurrent_config()).unwrap();
    for &i in &out.tree.leaves() {
        let l = &out.tree.node(i).ledger.ledger;
        assert_eq!(l.nu[0], out.startup.n);
        assert!(l.nu.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn escape_scan_leaf_escaping_at_promotion_end() {
    let k = derive_constants(&ConstantsInput::new(0.6, 1.2, 0.6, 0.3, 2)).unwrap();
    let leaf = LeafOutcome {
        id: 0,
        center_re: 0.0,
        center_im: 0.0,
        side: 1.0,
        depth: 0,
        status: SquareStatus::Escaped,
        promoted_at: Some(500),
        escape_time: Some(500),
        stop: None,
    };
    let stats = escape_scan(&[leaf], &k);
    assert_eq!(stats.promoted_fraction, 1.0);
    assert_eq!(stats.escaped_in_window_fraction, 1.0);
    assert!(stats.tail.is_empty());
}

#[test]
fn deletion_bound_form() {
    let k = derive_constants(&ConstantsInput::new(0.6, 1.2, 0.6, 0.3, 2)).unwrap();
    assert_relative_eq!(deletion_bound(&k, 20.0), 10.0 * (-1.5 * (k.kappa_prime - k.kappa) * 20.0).exp());
}

fn outputs(threads: usize, cfg: &RunConfig) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let out = pool.install(|| run(cfg)).unwrap();
    let (mut s, mut l, mut r) = (Vec::new(), Vec::new(), Vec::new());
    write_summary_json(&out.summary, &mut s).unwrap();
    write_ledger_csv(&out.tree, &mut l).unwrap();
    write_returns_csv(&out.returns, &mut r).unwrap();
    (s, l, r)
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    for cfg in [anchor_config(), recurrent_config()] {
        assert_eq!(outputs(1, &cfg), outputs(8, &cfg));
    }
}

#[test]
fn ledger_csv_header_and_rows() {
    let (_, l, _) = outputs(2, &anchor_config());
    let text = String::from_utf8(l).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("leaf_id,nu,alpha_tilde,gamma_under,deleted_fraction,status"));
    assert_eq!(lines.count(), 64);
}
