use ce_density::{scale_sweep, DensityRow, NSchedule, Sampler};
use ce_dynamics::{
    ce_window_test, chain_identity_residual, critical_orbit, transversality_ratio, Complex64, FamilyParams,
};
use ce_returns::{bound_order_violations, p_lt_n_violations, timeline, CriticalNeighborhoods, ReturnEvent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::pipeline::run_scenario;
use crate::scenario::Scenario;
use crate::LabError;

pub const SUITES: [&str; 8] = [
    "chain-identity",
    "transversality",
    "p-lt-n",
    "bound-order",
    "inessential-no-deletion",
    "q-bound",
    "deletion-bound",
    "density-trend",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: String,
    pub detail: String,
    pub pass: bool,
}

impl std::fmt::Display for CheckRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  {:<24} {:<32} {}", self.suite, self.check, self.detail)
    }
}

fn row(suite: &'static str, check: impl Into<String>, detail: String, pass: bool) -> CheckRow {
    CheckRow { suite, check: check.into(), detail, pass }
}

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Anchor for `density-trend`.
    pub anchor: Complex64,
    pub density_grid: usize,
    pub density_k_max: usize,
    /// Scenarios whose runs feed the exclusion suites.
    pub scenarios: Vec<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            anchor: Complex64::new(-2.0, 0.0),
            density_grid: 200,
            density_k_max: 8,
            scenarios: vec!["cheb-neighborhood".into(), "recurrent".into()],
        }
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<Vec<CheckRow>, LabError> {
    match name {
        "chain-identity" => chain_identity(opts.seed, 1000, 50),
        "transversality" => transversality(),
        "p-lt-n" | "p<n" => Ok(p_lt_n(&recurrence_population()?)),
        "bound-order" => Ok(bound_order(&recurrence_population()?)),
        "inessential-no-deletion" | "q-bound" | "deletion-bound" => exclusion_checks(name, &opts.scenarios),
        "density-trend" => density_trend(opts),
        "all" => {
            let mut rows = chain_identity(opts.seed, 1000, 50)?;
            rows.extend(transversality()?);
            let pop = recurrence_population()?;
            rows.extend(p_lt_n(&pop));
            rows.extend(bound_order(&pop));
            for s in ["inessential-no-deletion", "q-bound", "deletion-bound"] {
                rows.extend(exclusion_checks(s, &opts.scenarios)?);
            }
            rows.extend(density_trend(opts)?);
            Ok(rows)
        }
        _ => Err(LabError::Usage(format!("unknown suite {name:?}; expected one of {} or all", SUITES.join(", ")))),
    }
}

/// Worst chain-identity residual over `count` seeded parameters in `|c| <= 2`,
/// each tried for d = 2, 3, 4 at every pre-escape `n <= n_max`.
pub fn chain_identity(seed: u64, count: usize, n_max: usize) -> Result<Vec<CheckRow>, LabError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<Complex64> = (0..count)
        .map(|_| {
            let r = 2.0 * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
        })
        .collect();
    let mut rows = Vec::new();
    for d in 2..=4u32 {
        let worst = params
            .par_iter()
            .map(|&c| -> Result<f64, LabError> {
                let orbit = critical_orbit(&FamilyParams::new(d, c)?, n_max)?;
                Ok((1..=orbit.length()).map(|n| chain_identity_residual(&orbit, n)).fold(0.0, f64::max))
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(row(
            "chain-identity",
            format!("d={d}"),
            format!("{count} parameters, max residual {worst:.3e} (< 1e-9)"),
            worst < 1e-9,
        ));
    }
    Ok(rows)
}

pub fn transversality() -> Result<Vec<CheckRow>, LabError> {
    let t = transversality_ratio(&FamilyParams::new(2, Complex64::new(-2.0, 0.0))?, 60, 1e-15)?;
    let err = (t.estimate - Complex64::new(2.0 / 3.0, 0.0)).norm();
    Ok(vec![row(
        "transversality",
        "c=-2 limit 2/3",
        format!("estimate {} at n={}, error {err:.3e} (< 1e-9)", t.estimate, t.n_used),
        err < 1e-9,
    )])
}

/// Returns of one parameter, tagged with its anchor family.
pub struct Sampled {
    pub family: &'static str,
    pub events: Vec<ReturnEvent>,
}

pub const FAMILIES: [&str; 2] = ["near -2", "near -1.76"];
pub const POPULATION_N_MAX: usize = 10_000;
pub const CE_FILTER_GAMMA: f64 = 0.3;

/// Parameters next to -2 (2000 real values in [-2, -1.98]) and a 200 x 200
/// grid on Q(-1.76, 0.01), kept when the whole critical orbit passes the
/// CE window test at rate 0.3.
pub fn recurrence_population() -> Result<Vec<Sampled>, LabError> {
    let mut params: Vec<(&'static str, Complex64)> =
        (0..2000).map(|i| ("near -2", Complex64::new(-2.0 + 0.02 * (i as f64 + 0.5) / 2000.0, 0.0))).collect();
    let side = 200;
    for j in 0..side {
        for i in 0..side {
            let u = -1.0 + (2.0 * i as f64 + 1.0) / side as f64;
            let v = -1.0 + (2.0 * j as f64 + 1.0) / side as f64;
            params.push(("near -1.76", Complex64::new(-1.76 + 0.01 * u, 0.01 * v)));
        }
    }
    let nb = CriticalNeighborhoods::default();
    let out = params
        .par_iter()
        .map(|&(family, c)| -> Result<Option<Sampled>, LabError> {
            let orbit = critical_orbit(&FamilyParams::new(2, c)?, POPULATION_N_MAX)?;
            if orbit.length() == 0 || !ce_window_test(&orbit, CE_FILTER_GAMMA, 1, orbit.length())? {
                return Ok(None);
            }
            Ok(Some(Sampled { family, events: timeline(&orbit, &nb, POPULATION_N_MAX) }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(out.into_iter().flatten().collect())
}

fn per_family(pop: &[Sampled], mut f: impl FnMut(&[ReturnEvent]) -> (usize, usize, usize)) -> Vec<(&'static str, [usize; 4])> {
    let mut acc: Vec<(&'static str, [usize; 4])> = FAMILIES.iter().map(|&f| (f, [0; 4])).collect();
    for s in pop {
        let (checked, truncated, bad) = f(&s.events);
        let a = &mut acc.iter_mut().find(|(n, _)| *n == s.family).expect("known family").1;
        a[0] += 1;
        a[1] += checked;
        a[2] += truncated;
        a[3] += bad;
    }
    acc
}

pub fn p_lt_n(pop: &[Sampled]) -> Vec<CheckRow> {
    per_family(pop, |ev| {
        let truncated = ev.iter().filter(|e| e.truncated).count();
        (ev.len() - truncated, truncated, p_lt_n_violations(ev).len())
    })
    .into_iter()
    .map(|(family, [params, checked, truncated, bad])| {
        row(
            "p-lt-n",
            family,
            format!("{params} CE parameters, {checked} returns, {truncated} truncated excluded, {bad} violations"),
            bad == 0,
        )
    })
    .collect()
}

pub fn bound_order(pop: &[Sampled]) -> Vec<CheckRow> {
    per_family(pop, |ev| {
        let truncated = ev.iter().filter(|e| e.truncated).count();
        (ev.len().saturating_sub(1), truncated, bound_order_violations(ev).len())
    })
    .into_iter()
    .map(|(family, [params, pairs, truncated, bad])| {
        row(
            "bound-order",
            family,
            format!("{params} CE parameters, {pairs} consecutive pairs, {truncated} truncated, {bad} violations"),
            bad == 0,
        )
    })
    .collect()
}

fn exclusion_checks(suite: &str, scenarios: &[String]) -> Result<Vec<CheckRow>, LabError> {
    let mut rows = Vec::new();
    for name in scenarios {
        let s = run_scenario(&Scenario::load(name)?)?.output.summary;
        rows.push(match suite {
            "inessential-no-deletion" => row(
                "inessential-no-deletion",
                name.as_str(),
                format!("{} inessential returns, {} deletions", s.returns_inessential, s.inessential_deletions),
                s.inessential_deletions == 0,
            ),
            "q-bound" => row(
                "q-bound",
                name.as_str(),
                format!("{} escape lengths checked, {} violations", s.q_checked, s.q_violations),
                s.q_violations == 0,
            ),
            _ => row(
                "deletion-bound",
                name.as_str(),
                format!("{} essential returns checked, {} violations", s.deletion_bound_checked, s.deletion_bound_violations),
                s.deletion_bound_violations == 0,
            ),
        });
    }
    Ok(rows)
}

/// Density sweep over Q(anchor, 4^-k) with the default iteration schedule.
pub fn density_rows(anchor: Complex64, grid: usize, k_max: usize) -> Result<Vec<DensityRow>, LabError> {
    Ok(scale_sweep(anchor, 2, 1.0, 4.0, k_max, &Sampler::Grid { n: grid }, &NSchedule::default())?)
}

/// Rows from k = 2 on may not drop by more than twice the Wilson half-width;
/// the last row must reach 0.9.
pub fn trend_checks(rows: &[DensityRow]) -> Vec<CheckRow> {
    let mut out = Vec::new();
    let tail: Vec<&DensityRow> = rows.iter().filter(|r| r.k >= 2).collect();
    for w in tail.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slack = 2.0 * a.wilson_halfwidth.max(b.wilson_halfwidth);
        out.push(row(
            "density-trend",
            format!("k={} -> k={}", a.k, b.k),
            format!("{:.6} -> {:.6} (slack {slack:.2e})", a.density, b.density),
            b.density + slack >= a.density,
        ));
    }
    if let Some(last) = rows.last() {
        out.push(row(
            "density-trend",
            format!("final k={}", last.k),
            format!("density {:.6} (>= 0.9)", last.density),
            last.density >= 0.9,
        ));
    }
    out
}

fn density_trend(opts: &VerifyOptions) -> Result<Vec<CheckRow>, LabError> {
    Ok(trend_checks(&density_rows(opts.anchor, opts.density_grid, opts.density_k_max)?))
}
