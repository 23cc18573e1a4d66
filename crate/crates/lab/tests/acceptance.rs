//! Runs the ten acceptance criteria and prints one PASS/FAIL line each.
//! Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ce_density::{density_at_scale, scale_sweep, NSchedule, Sampler};
use ce_dynamics::{critical_orbit, transversality_ratio, Complex64, FamilyParams};
use ce_exclusion::{derive_constants, gamma_i, kappa, m_tilde, ConstantsInput};
use ce_lab::pipeline::run_scenario;
use ce_lab::scenario::{Scenario, BUILTIN};
use ce_lab::verify::{all_pass, chain_identity, density_rows, p_lt_n, recurrence_population, trend_checks};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    let r = f();
    let el = t.elapsed();
    let tag = format!("{:.2}s of {}s", el.as_secs_f64(), limit.as_secs());
    match r {
        Ok(m) if el <= limit => Ok(format!("{m}; {tag}")),
        Ok(m) => Err(format!("{m}; too slow, {tag}")),
        Err(m) => Err(format!("{m}; {tag}")),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn closed_form_anchor() -> Check {
    let o = critical_orbit(&FamilyParams::new(2, c(-2.0, 0.0)).unwrap(), 40).unwrap();
    let mut expect = vec![c(0.0, 0.0), c(-2.0, 0.0)];
    expect.resize(41, c(2.0, 0.0));
    if o.points != expect {
        return Err("orbit is not 0, -2, 2, 2, ...".into());
    }
    // |Df^n(-2)| = 4^n, so every gamma_n equals log 4.
    let worst = (1..=40).map(|n| (o.gamma[n] - 4f64.ln()).abs()).fold(0.0, f64::max);
    let t = transversality_ratio(&o.params, 60, 1e-15).unwrap();
    let l_err = (t.estimate - c(2.0 / 3.0, 0.0)).norm();
    ensure(
        worst < 1e-12 && l_err < 1e-9 && t.n_used <= 60,
        format!("max |gamma_n - log 4| = {worst:.1e}, |L - 2/3| = {l_err:.1e} at n = {}", t.n_used),
    )
}

fn chain_identity_check() -> Check {
    let rows = chain_identity(0, 1000, 50).map_err(|e| e.to_string())?;
    ensure(all_pass(&rows), rows.iter().map(|r| format!("{}: {}", r.check, r.detail)).collect::<Vec<_>>().join("; "))
}

fn p_lt_n_check() -> Check {
    let pop = recurrence_population().map_err(|e| e.to_string())?;
    let rows = p_lt_n(&pop);
    ensure(all_pass(&rows), rows.iter().map(|r| format!("{}: {}", r.check, r.detail)).collect::<Vec<_>>().join("; "))
}

fn summaries(names: &[&str]) -> Result<Vec<(String, ce_exclusion::Summary)>, String> {
    names
        .iter()
        .map(|&n| {
            let s = Scenario::builtin(n).unwrap();
            run_scenario(&s).map(|a| (n.to_string(), a.output.summary)).map_err(|e| format!("{n}: {e}"))
        })
        .collect()
}

fn inessential_check() -> Check {
    let all = summaries(&BUILTIN)?;
    let bad: usize = all.iter().map(|(_, s)| s.inessential_deletions).sum();
    let seen: usize = all.iter().map(|(_, s)| s.returns_inessential).sum();
    ensure(bad == 0, format!("{} runs, {seen} inessential returns, {bad} deletions", all.len()))
}

fn deletion_bound_check() -> Check {
    let all = summaries(&["cheb-neighborhood", "recurrent"])?;
    let detail = all
        .iter()
        .map(|(n, s)| format!("{n}: {} checked, {} violations", s.deletion_bound_checked, s.deletion_bound_violations))
        .collect::<Vec<_>>()
        .join("; ");
    ensure(all.iter().all(|(_, s)| s.deletion_bound_violations == 0), detail)
}

fn q_check() -> Check {
    let all = summaries(&["cheb-neighborhood", "recurrent"])?;
    let detail = all
        .iter()
        .map(|(n, s)| format!("{n}: {} checked, {} violations", s.q_checked, s.q_violations))
        .collect::<Vec<_>>()
        .join("; ");
    ensure(all.iter().all(|(_, s)| s.q_violations == 0), detail)
}

fn density_trend_check() -> Check {
    let rows = density_rows(c(-2.0, 0.0), 200, 8).map_err(|e| e.to_string())?;
    let checks = trend_checks(&rows);
    let table = rows.iter().map(|r| format!("{:.4}", r.density)).collect::<Vec<_>>().join(" ");
    let failed: Vec<_> = checks.iter().filter(|r| !r.pass).map(|r| r.check.clone()).collect();
    ensure(failed.is_empty(), format!("densities k=0..8: {table}; failed: {failed:?}"))
}

fn trivial_density_check() -> Check {
    let sampler = Sampler::Grid { n: 50 };
    let sched = NSchedule { base: 1000, growth: 1 };
    let mut detail = Vec::new();
    let mut ok = true;
    for (anchor, want) in [(c(0.0, 0.0), 0.0), (c(3.0, 0.0), 1.0)] {
        let mut rows = scale_sweep(anchor, 2, 0.1, 4.0, 8, &sampler, &sched).map_err(|e| e.to_string())?;
        // One scale below double spacing, resolved in extended precision.
        rows.push(density_at_scale(anchor, 2, 1e-15, &sampler, 1000, 9).map_err(|e| e.to_string())?);
        let hits = rows.iter().filter(|r| r.density == want).count();
        ok &= hits == rows.len();
        detail.push(format!("c0 = {}: {hits}/{} scales at {want}", anchor.re, rows.len()));
    }
    ensure(ok, detail.join("; "))
}

fn constants_check() -> Check {
    let k = kappa(0.6, 1.2);
    let derived = derive_constants(&ConstantsInput::new(0.6, 1.2, 0.6, 0.3, 2)).map_err(|e| e.to_string())?;
    let gi = gamma_i(0.6, 0.6, 0.9, 0.3, 2);
    let m = m_tilde(2, 1.3863, 0.01);
    let ulps = (m - 443_616.0).abs() / (443_616f64.next_up() - 443_616.0);
    ensure(
        k == 0.875 && derived.kappa == 0.875 && (gi - 0.02857).abs() < 1e-5 && ulps <= 4.0,
        format!("kappa = {k}, gamma_I = {gi:.6}, M~ = {m} ({ulps} ulp from 443616)"),
    )
}

fn run_dir(bin: &str, threads: &str, dir: &Path) -> Result<(), String> {
    let o = Command::new(bin)
        .args(["run", "cheb-neighborhood", "--out", dir.to_str().unwrap()])
        .env("CE_LAB_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), String::from_utf8_lossy(&o.stderr).into_owned()).map(|_| ())
}

fn determinism_check() -> Check {
    let bin = env!("CARGO_BIN_EXE_ce-lab");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (one, eight) = (tmp.path().join("t1"), tmp.path().join("t8"));
    run_dir(bin, "1", &one)?;
    run_dir(bin, "8", &eight)?;
    let files = ["summary.json", "ledger.csv", "returns.csv", "leaves.csv", "q_checks.csv", "tree.jsonl", "manifest.json"];
    let differ: Vec<&str> = files
        .iter()
        .copied()
        .filter(|f| std::fs::read(one.join(f)).ok() != std::fs::read(eight.join(f)).ok())
        .collect();
    ensure(differ.is_empty(), format!("{} files compared, differing: {differ:?}", files.len()))
}

fn main() {
    let secs = Duration::from_secs;
    let unlimited = secs(3600);
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("closed-form anchor at -2", secs(1), closed_form_anchor),
        ("chain identity residual", secs(5), chain_identity_check),
        ("p < n at every return", secs(60), p_lt_n_check),
        ("no deletion at inessential returns", unlimited, inessential_check),
        ("deleted fraction bound at essential returns", unlimited, deletion_bound_check),
        ("escape length q <= M~ r", unlimited, q_check),
        ("density trend at -2", secs(300), density_trend_check),
        ("interior and exterior density", unlimited, trivial_density_check),
        ("constants arithmetic", unlimited, constants_check),
        ("thread-count determinism", unlimited, determinism_check),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (verdict, detail) = match within(limit, f) {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("{verdict} {:>2} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
