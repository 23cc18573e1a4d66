use std::collections::BTreeSet;

use ce_partition::{PartitionTree, SquareStatus};
use serde::Serialize;

use crate::engine::{InitialDeletion, LeafOutcome, QCheck, ReturnRecord, RunConfig, SquareRecord};
use crate::{RunConstants, StartupReport, StartupStatus};

/// `10 e^{-(3/2)(kappa' - kappa) r}`, the deleted-fraction bound with sampling slack.
pub fn deletion_bound(k: &RunConstants, r: f64) -> f64 {
    10.0 * (-1.5 * (k.kappa_prime - k.kappa) * r).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeStats {
    /// Area fraction (of the leaves passed in) that reached the end of promotion.
    pub promoted_fraction: f64,
    /// Of the promoted area, the part escaping within `[m0, (1 + iota) m0]`.
    pub escaped_in_window_fraction: f64,
    /// `(t, measured fraction with E >= t, bound 10 e^{-(1 - kappa_hat) t / M~})`.
    pub tail: Vec<(usize, f64, f64)>,
    pub tail_violations: usize,
}

/// Escape-time statistics over the leaves that finished promotion.
/// Leaves still undetermined count as `E = inf`.
pub fn escape_scan(leaves: &[LeafOutcome], k: &RunConstants) -> EscapeStats {
    let promoted: Vec<(&LeafOutcome, usize)> =
        leaves.iter().filter_map(|l| l.promoted_at.map(|m0| (l, m0))).collect();
    let total = area_sum(leaves.iter());
    let p_area = area_sum(promoted.iter().map(|(l, _)| *l));
    let e_of = |l: &LeafOutcome, m0: usize| match (l.status, l.escape_time) {
        (SquareStatus::Escaped, Some(te)) => Some(te.saturating_sub(m0)),
        _ => None,
    };
    let in_window = area_sum(
        promoted
            .iter()
            .filter(|(l, m0)| e_of(l, *m0).is_some_and(|e| (*m0 + e) as f64 <= (1.0 + k.iota) * *m0 as f64))
            .map(|(l, _)| *l),
    );
    let times: BTreeSet<usize> = promoted.iter().filter_map(|(l, m0)| e_of(l, *m0)).filter(|&e| e > 0).collect();
    let mut tail = Vec::new();
    let mut tail_violations = 0;
    for t in times {
        let frac = area_sum(promoted.iter().filter(|(l, m0)| e_of(l, *m0).is_none_or(|e| e >= t)).map(|(l, _)| *l))
            / p_area;
        let bound = 10.0 * (-(1.0 - k.kappa_hat) * t as f64 / k.m_tilde).exp();
        if frac > bound {
            tail_violations += 1;
        }
        tail.push((t, frac, bound));
    }
    EscapeStats {
        promoted_fraction: if total > 0.0 { p_area / total } else { 0.0 },
        escaped_in_window_fraction: if p_area > 0.0 { in_window / p_area } else { 0.0 },
        tail,
        tail_violations,
    }
}

/// Run summary. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub startup_status: StartupStatus,
    pub startup_n: usize,
    pub delta0: f64,
    pub delta0_predicted: Option<f64>,
    /// Promotion deletions, relative to the area left after the initial deletion.
    pub delta1: f64,
    /// Survivors not escaped within `[m0, (1 + iota) m0]` (never-promoted survivors count as not escaped).
    pub delta2: f64,
    /// Survivors not escaped by the run budget.
    pub delta2_budget: f64,
    pub product: f64,
    pub escaped_fraction: f64,
    pub deleted_fraction: f64,
    pub undetermined_fraction: f64,
    pub anomalous_fraction: f64,
    pub leaves: usize,
    pub returns_essential_u: usize,
    pub returns_essential_pseudo: usize,
    pub returns_inessential: usize,
    pub inessential_deletions: usize,
    pub would_exceed: usize,
    pub deletion_bound_checked: usize,
    pub deletion_bound_violations: usize,
    pub q_checked: usize,
    pub q_violations: usize,
    pub promoted_fraction: f64,
    pub tail_checked: usize,
    pub tail_violations: usize,
    pub signatures: usize,
    pub signature_violations: usize,
    pub max_distortion_sum: Option<f64>,
    pub comparability_k: f64,
}

fn area_sum<'a>(leaves: impl Iterator<Item = &'a LeafOutcome>) -> f64 {
    leaves.fold(0.0, |a, l| a + l.side * l.side)
}

fn ln_binomial(n: i64, k: i64) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub(crate) fn summarize(
    cfg: &RunConfig,
    st: &StartupReport,
    k: Option<&RunConstants>,
    initial: Option<&InitialDeletion>,
    tree: &PartitionTree<SquareRecord>,
    returns: &[ReturnRecord],
    q_checks: &[QCheck],
) -> Summary {
    // Sum of leaf areas rather than side^2 of the root, so fractions sum to 1 exactly when they should.
    let root_area = tree.leaf_area();
    let leaves = tree.leaves();
    let area = |s: SquareStatus| tree.area_with_status(s);
    let anomalous = area(SquareStatus::Anomalous);
    let deleted = area(SquareStatus::DeletedAlpha);
    let escaped = area(SquareStatus::Escaped);
    let undetermined = area(SquareStatus::Undetermined);
    let deleted0 = initial.map_or(0.0, |i| i.deleted_area);
    let eff = root_area - anomalous;
    let after0 = eff - deleted0;
    let survivors = escaped + undetermined;
    let window_bad: f64 = leaves
        .iter()
        .map(|&i| tree.node(i))
        .filter(|n| match n.status() {
            SquareStatus::Undetermined => true,
            SquareStatus::Escaped => match (n.ledger.ledger.promoted_at, n.ledger.escape_time, k) {
                (Some(m0), Some(te), Some(k)) => te as f64 > (1.0 + k.iota) * m0 as f64,
                _ => false,
            },
            _ => false,
        })
        .fold(0.0, |a, n| a + n.area());
    let delta0 = ratio(deleted0, eff);
    let delta1 = ratio(deleted - deleted0, after0);
    let delta2 = ratio(window_bad, survivors);

    let count = |label: &str| returns.iter().filter(|r| r.kind == label).count();
    let inessential: Vec<&ReturnRecord> = returns.iter().filter(|r| r.kind.starts_with("inessential")).collect();
    let inessential_deletions = inessential.iter().filter(|r| r.deleted_fraction > 0.0).count();
    assert_eq!(inessential_deletions, 0, "deletion recorded at an inessential return");

    let deletion_bound: Vec<&ReturnRecord> = returns
        .iter()
        .filter(|r| !r.post_promotion && r.deletion_r.is_some_and(|x| x >= cfg.nbhd.big_delta))
        .collect();
    let deletion_bound_violations = deletion_bound
        .iter()
        .filter(|r| r.deletion_bound.is_some_and(|b| r.deleted_fraction > b))
        .count();

    let outcomes: Vec<LeafOutcome> = crate::engine::outcomes(tree);
    let esc = k.map(|k| escape_scan(&outcomes, k));

    let mut sigs = BTreeSet::new();
    for &i in &leaves {
        let rec = &tree.node(i).ledger;
        let (s, r) = rec.post_signature;
        if rec.ledger.promoted_at.is_some() && s > 0 {
            sigs.insert((s as i64, r));
        }
    }
    let signature_violations = k.map_or(0, |k| {
        sigs.iter()
            .filter(|&&(s, r)| ln_binomial(r + s - 1, s - 1) > r as f64 * (1.0 - k.kappa_hat) / 3.0)
            .count()
    });

    Summary {
        startup_status: st.status,
        startup_n: st.n,
        delta0,
        delta0_predicted: initial.map(|i| i.predicted_bound),
        delta1,
        delta2,
        delta2_budget: ratio(undetermined, survivors),
        product: (1.0 - delta0) * (1.0 - delta1) * (1.0 - delta2),
        escaped_fraction: escaped / root_area,
        deleted_fraction: deleted / root_area,
        undetermined_fraction: undetermined / root_area,
        anomalous_fraction: anomalous / root_area,
        leaves: leaves.len(),
        returns_essential_u: count("essential_u"),
        returns_essential_pseudo: count("essential_pseudo"),
        returns_inessential: inessential.len(),
        inessential_deletions,
        would_exceed: inessential.iter().map(|r| r.would_exceed).sum(),
        deletion_bound_checked: deletion_bound.len(),
        deletion_bound_violations,
        q_checked: q_checks.len(),
        q_violations: q_checks.iter().filter(|q| q.q as f64 > q.bound).count(),
        promoted_fraction: esc.as_ref().map_or(0.0, |e| e.promoted_fraction),
        tail_checked: esc.as_ref().map_or(0, |e| e.tail.len()),
        tail_violations: esc.as_ref().map_or(0, |e| e.tail_violations),
        signatures: sigs.len(),
        signature_violations,
        max_distortion_sum: st.max_distortion_sum,
        comparability_k: st.comparability_k,
    }
}

impl Summary {
    /// The start-up status is a large-scale exit (no constants needed).
    pub fn trivially_escaped(&self) -> bool {
        self.startup_status == StartupStatus::LargeScale
    }
}
