use ce_dynamics::Complex64;
use ce_returns::CriticalNeighborhoods;

use crate::{
    compliant_at, image_geometry, lower_bound_scale, ImageMap, PartitionError, PartitionTree,
    SquareStatus,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Interior lattice size passed to `image_geometry`.
    pub grid: usize,
    /// Deepest depth, counted from the root of the whole run.
    pub depth_limit: u32,
    /// Squares whose sampled image lies inside `D(0, radius)` are deleted whole.
    pub prune_radius: Option<f64>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { grid: 0, depth_limit: 48, prune_radius: None }
    }
}

/// Below this side a square's corners stop being distinct doubles.
fn precision_floor(center: Complex64) -> f64 {
    32.0 * f64::EPSILON * center.norm().max(1.0)
}

/// Deepest depth reachable from a square at `depth` with side `side`,
/// capped by `depth_limit` and by the double-precision floor at `center`.
pub fn effective_depth_limit(center: Complex64, side: f64, depth: u32, depth_limit: u32) -> u32 {
    let floor = precision_floor(center);
    let mut dl = depth;
    let mut s = side;
    while dl < depth_limit && s / 2.0 >= floor {
        dl += 1;
        s /= 2.0;
    }
    dl
}

/// Splits leaf `i` until every leaf is a partition element at time `k`.
///
/// Leaves come back in NW, NE, SW, SE depth-first order with their final
/// status: `Active`, `DeletedAlpha` (pruned), `Escaped` (center escaped at
/// the depth floor), or `Anomalous`. A leaf that straddles 0 at the depth
/// floor, or overshoots the essential lower bound by more than a factor 4,
/// is `Anomalous`. A non-compliant leaf that is not straddling at the floor
/// undoes the whole refinement and returns `DepthLimit`.
pub fn refine_at_essential_return<L: Clone + Default, M: ImageMap + ?Sized>(
    tree: &mut PartitionTree<L>,
    i: usize,
    map: &M,
    k: usize,
    nbhd: &CriticalNeighborhoods,
    opts: &RefineOptions,
) -> Result<Vec<usize>, PartitionError> {
    assert!(tree.is_leaf(i), "refine needs a leaf");
    assert_eq!(tree.node(i).status(), SquareStatus::Active, "refine needs an active square");
    let root = tree.node(i);
    let limit = effective_depth_limit(root.center, root.side, root.depth, opts.depth_limit);
    let mark = tree.len();
    let mut out = Vec::new();
    let mut stack = vec![i];
    while let Some(n) = stack.pop() {
        let (center, side, depth) = {
            let sq = tree.node(n);
            (sq.center, sq.side, sq.depth)
        };
        let can_split = depth < limit;
        match image_geometry(map, center, side, k, opts.grid) {
            Err(PartitionError::SampleEscaped { .. }) => {
                if can_split {
                    stack.extend(tree.split(n).iter().rev());
                } else {
                    let s = if map.image(center, k).is_none() {
                        SquareStatus::Escaped
                    } else {
                        SquareStatus::Anomalous
                    };
                    tree.node_mut(n).set_status(s);
                    out.push(n);
                }
            }
            Err(e) => return Err(e),
            Ok(g) => {
                tree.node_mut(n).last_geometry = Some(g);
                if opts.prune_radius.is_some_and(|r| g.max_modulus < r) {
                    tree.node_mut(n).set_status(SquareStatus::DeletedAlpha);
                    out.push(n);
                } else if compliant_at(&g, nbhd) {
                    let in_u = g.dist > 0.0 && g.dist <= nbhd.delta();
                    if n != i && in_u && g.diam < 0.125 * lower_bound_scale(g.dist) {
                        tree.node_mut(n).set_status(SquareStatus::Anomalous);
                    }
                    out.push(n);
                } else if can_split {
                    stack.extend(tree.split(n).iter().rev());
                } else if g.dist == 0.0 {
                    tree.node_mut(n).set_status(SquareStatus::Anomalous);
                    out.push(n);
                } else {
                    tree.rollback(i, mark);
                    return Err(PartitionError::DepthLimit { limit });
                }
            }
        }
    }
    Ok(out)
}
