use ce_dynamics::{critical_orbit, lyapunov_summary, Complex64, FamilyParams, OrbitRecord};
use ce_partition::{
    classify_return_set, refine_at_essential_return, FamilyMap, ImageMap, PartitionError,
    PartitionTree, RefineOptions, SquareStatus,
};
use ce_returns::{r_index, CriticalNeighborhoods, ReturnKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::ledger::{initial_gamma_under, PromotionLedger};
use crate::orbits::SquareOrbits;
use crate::stats::{deletion_bound, summarize, Summary};
use crate::{derive_constants, startup, ConstantsInput, ExclusionError, RunConstants, StartupReport, StartupStatus};

/// Free constant choices; `None` picks the derived default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantChoices {
    pub kappa_prime: Option<f64>,
    pub kappa_tilde: Option<f64>,
    pub c_tilde: f64,
    pub c1: f64,
    pub alpha: Option<f64>,
}

impl Default for ConstantChoices {
    fn default() -> Self {
        Self { kappa_prime: None, kappa_tilde: None, c_tilde: 0.05, c1: 1.1, alpha: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub c0: Complex64,
    pub d: u32,
    pub epsilon: f64,
    pub nbhd: CriticalNeighborhoods,
    pub n_max: usize,
    pub depth_limit: u32,
    pub grid: usize,
    pub choices: ConstantChoices,
    /// Outside-expansion rate, measured by the caller.
    pub gamma_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// No free return after the last one before the budget.
    LedgerStall,
    /// Returns kept coming but no escape before the budget.
    Budget,
    /// A sample was still bound at the budget.
    BoundTruncated,
    DepthLimit,
    Straddle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct EssentialMark {
    t: usize,
    r: Option<i64>,
    /// `sup alpha_nu * nu` at that return.
    r_deletion: f64,
}

/// Per-square state carried through the tree; children inherit a copy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SquareRecord {
    pub ledger: PromotionLedger,
    pub escape_time: Option<usize>,
    pub stop: Option<StopReason>,
    prev_essential: Option<EssentialMark>,
    /// Essential returns after promotion: count and summed depth.
    pub post_signature: (usize, i64),
}

/// One set-level free return.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnRecord {
    pub t: usize,
    pub center_re: f64,
    pub center_im: f64,
    pub depth: u32,
    pub kind: &'static str,
    pub dist: f64,
    pub diam: f64,
    pub r: Option<i64>,
    pub alpha_tilde: f64,
    pub gamma_under: f64,
    pub deleted_fraction: f64,
    pub deletion_r: Option<f64>,
    pub deletion_bound: Option<f64>,
    pub would_exceed: usize,
    pub post_promotion: bool,
}

/// Time from an essential return to the next essential return or escape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QCheck {
    pub t_start: usize,
    pub t_end: usize,
    pub r: i64,
    pub q: usize,
    pub bound: f64,
    pub ended_by_escape: bool,
    pub post_promotion: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialDeletion {
    pub deleted_fraction: f64,
    /// `e^{-2 (C1 - 1) alpha_N(c0) N}`.
    pub predicted_bound: f64,
    pub deleted_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafOutcome {
    pub id: usize,
    pub center_re: f64,
    pub center_im: f64,
    pub side: f64,
    pub depth: u32,
    pub status: SquareStatus,
    pub promoted_at: Option<usize>,
    pub escape_time: Option<usize>,
    pub stop: Option<StopReason>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub startup: StartupReport,
    pub constants: Option<RunConstants>,
    pub initial: Option<InitialDeletion>,
    pub tree: PartitionTree<SquareRecord>,
    pub leaves: Vec<LeafOutcome>,
    pub returns: Vec<ReturnRecord>,
    pub q_checks: Vec<QCheck>,
    pub summary: Summary,
}

#[derive(Default)]
struct Logs {
    returns: Vec<ReturnRecord>,
    q_checks: Vec<QCheck>,
}

fn r_of(dist: f64) -> Option<i64> {
    (dist > 0.0 && dist < 1.0).then(|| r_index(dist))
}

/// `alpha_t` at a parameter, or `None` if it escaped by `t`.
fn alpha_at(d: u32, c: Complex64, t: usize) -> Option<f64> {
    FamilyMap { d }.image(c, t).map(|z| -z.norm().ln() / t as f64)
}

fn anchor_constants(
    cfg: &RunConfig,
    anchor: &OrbitRecord,
    st: &StartupReport,
) -> Result<Option<RunConstants>, ExclusionError> {
    if anchor.length() < 10 || st.n > anchor.length() {
        return Ok(None);
    }
    let lyap = lyapunov_summary(anchor, 0.5);
    let alpha_n = anchor.alpha[st.n];
    let alpha_nu0 = match st.status {
        StartupStatus::EssentialReturn => alpha_n,
        StartupStatus::LargeScale => alpha_n.max(0.0),
    };
    let ch = cfg.choices;
    let input = ConstantsInput {
        gamma_under: 0.9 * lyap.gamma_lower,
        gamma_bar: lyap.gamma_bar_trivial,
        gamma_h: cfg.gamma_h,
        alpha_nu0,
        d: cfg.d,
        kappa_prime: ch.kappa_prime,
        kappa_tilde: ch.kappa_tilde,
        c_tilde: ch.c_tilde,
        c1: ch.c1,
        alpha: ch.alpha,
    };
    derive_constants(&input).map(Some)
}

/// Start-up, constants, initial deletion, promotion and escape scan.
///
/// Start-up failures are reported before constant failures.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, ExclusionError> {
    let st = startup(cfg.d, cfg.c0, cfg.epsilon, &cfg.nbhd, cfg.grid, cfg.n_max)?;
    let anchor = critical_orbit(&FamilyParams::new(cfg.d, cfg.c0)?, cfg.n_max)?;
    let constants = anchor_constants(cfg, &anchor, &st)?;
    let mut tree = PartitionTree::<SquareRecord>::new(cfg.c0, cfg.epsilon);
    let mut logs = Logs::default();
    let mut initial = None;
    match st.status {
        StartupStatus::LargeScale => {
            let root = tree.node_mut(PartitionTree::<SquareRecord>::ROOT);
            root.set_status(SquareStatus::Escaped);
            root.ledger.escape_time = Some(st.n);
        }
        StartupStatus::EssentialReturn => {
            let k = constants.ok_or(ExclusionError::InvalidConstants {
                inequality: "anchor orbit long enough to measure exponents",
                detail: format!("length {}", anchor.length()),
            })?;
            let (active, init) = initial_deletion(&mut tree, cfg, &k, st.n, anchor.alpha[st.n])?;
            initial = Some(init);
            let subtrees: Vec<Result<(PartitionTree<SquareRecord>, Logs), ExclusionError>> = active
                .par_iter()
                .map(|&leaf| {
                    let mut sub = PartitionTree::from_square(tree.node(leaf).clone());
                    let mut l = Logs::default();
                    follow(&mut sub, cfg, &k, st.n, &mut l)?;
                    Ok((sub, l))
                })
                .collect();
            for (&leaf, res) in active.iter().zip(subtrees) {
                let (sub, l) = res?;
                tree.graft(leaf, sub);
                logs.returns.extend(l.returns);
                logs.q_checks.extend(l.q_checks);
            }
        }
    }
    let leaves = outcomes(&tree);
    let summary = summarize(cfg, &st, constants.as_ref(), initial.as_ref(), &tree, &logs.returns, &logs.q_checks);
    Ok(RunOutput {
        startup: st,
        constants,
        initial,
        tree,
        leaves,
        returns: logs.returns,
        q_checks: logs.q_checks,
        summary,
    })
}

pub(crate) fn outcomes(tree: &PartitionTree<SquareRecord>) -> Vec<LeafOutcome> {
    tree.leaves()
        .into_iter()
        .enumerate()
        .map(|(id, i)| {
            let n = tree.node(i);
            LeafOutcome {
                id,
                center_re: n.center.re,
                center_im: n.center.im,
                side: n.side,
                depth: n.depth,
                status: n.status(),
                promoted_at: n.ledger.ledger.promoted_at,
                escape_time: n.ledger.escape_time,
                stop: n.ledger.stop,
            }
        })
        .collect()
}

/// Refines the root at `N`, pruning squares inside `|xi_N(c0)|^{C1}`, then
/// deletes leaves whose center has `alpha_N(c) > C1 alpha_N(c0)`.
/// Returns the surviving active leaves.
fn initial_deletion(
    tree: &mut PartitionTree<SquareRecord>,
    cfg: &RunConfig,
    k: &RunConstants,
    n: usize,
    alpha_n_c0: f64,
) -> Result<(Vec<usize>, InitialDeletion), ExclusionError> {
    let root = PartitionTree::<SquareRecord>::ROOT;
    let root_area = tree.node(root).area();
    let threshold = k.c1 * alpha_n_c0;
    let opts = RefineOptions {
        grid: cfg.grid,
        depth_limit: cfg.depth_limit,
        prune_radius: Some((-threshold * n as f64).exp()),
    };
    let predicted_bound = (-2.0 * (k.c1 - 1.0) * alpha_n_c0 * n as f64).exp();
    let leaves = match refine_at_essential_return(tree, root, &FamilyMap { d: cfg.d }, n, &cfg.nbhd, &opts) {
        Ok(l) => l,
        Err(PartitionError::DepthLimit { .. }) => {
            let r = tree.node_mut(root);
            r.set_status(SquareStatus::Anomalous);
            r.ledger.stop = Some(StopReason::DepthLimit);
            return Ok((Vec::new(), InitialDeletion { deleted_fraction: 0.0, predicted_bound, deleted_area: 0.0 }));
        }
        Err(e) => return Err(e.into()),
    };
    let mut active = Vec::new();
    for &l in &leaves {
        let node = tree.node_mut(l);
        match node.status() {
            SquareStatus::Active => {
                let a = alpha_at(cfg.d, node.center, n);
                if a.is_none_or(|a| a > threshold) {
                    node.set_status(SquareStatus::DeletedAlpha);
                } else {
                    active.push(l);
                }
            }
            SquareStatus::Escaped => node.ledger.escape_time = Some(n),
            SquareStatus::Anomalous => node.ledger.stop = Some(StopReason::Straddle),
            _ => {}
        }
    }
    let deleted_area: f64 = leaves
        .iter()
        .map(|&l| tree.node(l))
        .filter(|s| s.status() == SquareStatus::DeletedAlpha)
        .map(|s| s.area())
        .fold(0.0, |a, b| a + b);
    let deleted_fraction = deleted_area / root_area;
    for &l in &leaves {
        tree.node_mut(l).ledger.ledger.deleted_fraction_at.push((n, deleted_fraction));
    }
    Ok((active, InitialDeletion { deleted_fraction, predicted_bound, deleted_area }))
}

struct WorkItem {
    idx: usize,
    t0: usize,
}

enum Exit {
    Escaped(usize),
    Stopped(StopReason),
    /// The square was split, deleted or retired at a return.
    Done,
}

/// Follows one partition element from its return at `t0` (start-up time
/// for the subtree root) through promotion until escape or budget.
fn follow(
    sub: &mut PartitionTree<SquareRecord>,
    cfg: &RunConfig,
    k: &RunConstants,
    n_start: usize,
    logs: &mut Logs,
) -> Result<(), ExclusionError> {
    let nb = &cfg.nbhd;
    let s_large = nb.large_scale();
    let mut work = vec![WorkItem { idx: PartitionTree::<SquareRecord>::ROOT, t0: n_start }];
    while let Some(WorkItem { idx, t0 }) = work.pop() {
        let (center, side) = {
            let n = sub.node(idx);
            (n.center, n.side)
        };
        let so = SquareOrbits::new(cfg.d, center, side, cfg.grid, cfg.n_max)?;
        let sup0 = so.sup_alpha(t0);
        let (p0, trunc0) = so.bound_period(t0, nb.beta, cfg.n_max);
        {
            let rec = &mut sub.node_mut(idx).ledger;
            if rec.ledger.nu.is_empty() {
                let inf_gamma = if t0 >= 2 { so.inf_gamma(t0 - 1) } else { k.gamma_under };
                let g0 = initial_gamma_under(inf_gamma, sup0, cfg.d, t0);
                rec.ledger = PromotionLedger::start(t0, sup0, g0, p0, k.c_tilde);
            } else {
                rec.ledger.set_return_data(sup0, p0);
            }
            // Every work item starts at an essential return.
            let g = so.geometry(t0);
            rec.prev_essential = Some(EssentialMark { t: t0, r: r_of(g.dist), r_deletion: sup0 * t0 as f64 });
        }
        let exit = if trunc0 {
            Exit::Stopped(StopReason::BoundTruncated)
        } else {
            scan(sub, idx, &so, cfg, k, t0, t0 + p0, s_large, logs, &mut work)?
        };
        let node = sub.node_mut(idx);
        match exit {
            Exit::Escaped(te) => {
                node.set_status(SquareStatus::Escaped);
                node.ledger.escape_time = Some(te);
                if let Some(m) = node.ledger.prev_essential {
                    push_q(logs, &m, te, true, node.ledger.ledger.promoted_at.is_some_and(|p| p <= m.t), k);
                }
            }
            Exit::Stopped(r) => {
                let s = if matches!(r, StopReason::DepthLimit | StopReason::Straddle) {
                    SquareStatus::Anomalous
                } else {
                    SquareStatus::Undetermined
                };
                node.set_status(s);
                node.ledger.stop = Some(r);
            }
            Exit::Done => {}
        }
    }
    Ok(())
}

fn push_q(logs: &mut Logs, m: &EssentialMark, t_end: usize, by_escape: bool, post: bool, k: &RunConstants) {
    if let Some(r) = m.r {
        logs.q_checks.push(QCheck {
            t_start: m.t,
            t_end,
            r,
            q: t_end - m.t,
            bound: k.m_tilde * r as f64,
            ended_by_escape: by_escape,
            post_promotion: post,
        });
    }
}

#[allow(clippy::too_many_arguments)]
fn scan(
    sub: &mut PartitionTree<SquareRecord>,
    idx: usize,
    so: &SquareOrbits,
    cfg: &RunConfig,
    k: &RunConstants,
    t0: usize,
    mut bound_end: usize,
    s_large: f64,
    logs: &mut Logs,
    work: &mut Vec<WorkItem>,
) -> Result<Exit, ExclusionError> {
    let nb = &cfg.nbhd;
    let mut saw_return = false;
    for t in t0 + 1..=cfg.n_max {
        let escaped = so.escaped_by(t);
        let g = (!escaped).then(|| so.geometry(t));
        if escaped || (t > bound_end && g.is_some_and(|g| g.diam >= s_large)) {
            let te = t.max(bound_end + 1);
            return Ok(if te > cfg.n_max { Exit::Stopped(StopReason::Budget) } else { Exit::Escaped(te) });
        }
        let g = g.unwrap();
        if t <= bound_end || g.dist >= nb.delta_prime() {
            continue;
        }
        saw_return = true;
        let kind = classify_return_set(&g);
        let node = sub.node_mut(idx);
        let (center, depth, area) = (node.center, node.depth, node.area());
        let rec = &mut node.ledger;
        let promoted_before = rec.ledger.promoted_at.is_some();
        let u = rec.ledger.push(t, kind, k);
        let mark = rec.prev_essential.expect("work items start at an essential return");
        let essential = kind == ReturnKind::EssentialSet;
        let mut record = ReturnRecord {
            t,
            center_re: center.re,
            center_im: center.im,
            depth,
            kind: kind_label(kind, g.dist <= nb.delta()),
            dist: g.dist,
            diam: g.diam,
            r: r_of(g.dist),
            alpha_tilde: u.alpha_tilde,
            gamma_under: u.gamma_under,
            deleted_fraction: 0.0,
            deletion_r: None,
            deletion_bound: None,
            would_exceed: 0,
            post_promotion: promoted_before,
        };
        if essential {
            push_q(logs, &mark, t, false, promoted_before, k);
            record.deletion_r = Some(mark.r_deletion);
            record.deletion_bound = Some(deletion_bound(k, mark.r_deletion));
        }
        let sup = so.sup_alpha(t);
        let (p, trunc) = so.bound_period(t, nb.beta, cfg.n_max);
        let keep_following = |rec: &mut SquareRecord, bound_end: &mut usize| {
            rec.ledger.set_return_data(sup, p);
            if essential {
                rec.prev_essential = Some(EssentialMark { t, r: r_of(g.dist), r_deletion: sup * t as f64 });
            }
            *bound_end = t + p;
        };

        if promoted_before {
            if essential {
                rec.post_signature.0 += 1;
                rec.post_signature.1 += r_of(g.dist).unwrap_or(0);
            }
            keep_following(rec, &mut bound_end);
            logs.returns.push(record);
            if trunc {
                return Ok(Exit::Stopped(StopReason::BoundTruncated));
            }
            continue;
        }

        if !essential {
            // Inessential: no deletion, by construction.
            record.would_exceed = so.orbits.iter().filter(|o| o.alpha[t] > u.alpha_tilde).count();
            keep_following(rec, &mut bound_end);
            logs.returns.push(record);
            if trunc {
                return Ok(Exit::Stopped(StopReason::BoundTruncated));
            }
            continue;
        }

        if g.dist <= nb.delta() {
            let opts = RefineOptions {
                grid: cfg.grid,
                depth_limit: cfg.depth_limit,
                prune_radius: Some((-u.alpha_tilde * t as f64).exp()),
            };
            let leaves = match refine_at_essential_return(sub, idx, &FamilyMap { d: cfg.d }, t, nb, &opts) {
                Ok(l) => l,
                Err(PartitionError::DepthLimit { .. }) => {
                    logs.returns.push(record);
                    return Ok(Exit::Stopped(StopReason::DepthLimit));
                }
                Err(e) => return Err(e.into()),
            };
            let mut deleted = 0.0;
            let mut next = Vec::new();
            for &l in &leaves {
                let leaf = sub.node_mut(l);
                match leaf.status() {
                    SquareStatus::Active => {
                        if alpha_at(cfg.d, leaf.center, t).is_none_or(|a| a > u.alpha_tilde) {
                            leaf.set_status(SquareStatus::DeletedAlpha);
                            deleted += leaf.area();
                        } else {
                            next.push(l);
                        }
                    }
                    SquareStatus::DeletedAlpha => deleted += leaf.area(),
                    SquareStatus::Escaped => leaf.ledger.escape_time = Some(t),
                    SquareStatus::Anomalous => leaf.ledger.stop = Some(StopReason::Straddle),
                    _ => {}
                }
            }
            let frac = deleted / area;
            for &l in &leaves {
                sub.node_mut(l).ledger.ledger.deleted_fraction_at.push((t, frac));
            }
            record.deleted_fraction = frac;
            logs.returns.push(record);
            work.extend(next.into_iter().rev().map(|idx| WorkItem { idx, t0: t }));
            return Ok(Exit::Done);
        }

        // Essential return into U' \ U: the deletion test applies to the square itself.
        let c_alpha = so.center().alpha[t];
        if c_alpha > u.alpha_tilde {
            rec.ledger.deleted_fraction_at.push((t, 1.0));
            record.deleted_fraction = 1.0;
            logs.returns.push(record);
            sub.node_mut(idx).set_status(SquareStatus::DeletedAlpha);
            return Ok(Exit::Done);
        }
        keep_following(rec, &mut bound_end);
        logs.returns.push(record);
        if trunc {
            return Ok(Exit::Stopped(StopReason::BoundTruncated));
        }
    }
    Ok(Exit::Stopped(if saw_return { StopReason::Budget } else { StopReason::LedgerStall }))
}

fn kind_label(kind: ReturnKind, into_u: bool) -> &'static str {
    match (kind, into_u) {
        (ReturnKind::EssentialSet, true) => "essential_u",
        (ReturnKind::EssentialSet, false) => "essential_pseudo",
        (_, true) => "inessential_u",
        (_, false) => "inessential_pseudo",
    }
}
