use std::io::{self, Write};

use ce_dynamics::Complex64;
use serde::Serialize;

use crate::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareStatus {
    Active,
    DeletedAlpha,
    Escaped,
    Undetermined,
    Anomalous,
}

impl SquareStatus {
    pub fn label(self) -> &'static str {
        match self {
            SquareStatus::Active => "active",
            SquareStatus::DeletedAlpha => "deleted_alpha",
            SquareStatus::Escaped => "escaped",
            SquareStatus::Undetermined => "undetermined",
            SquareStatus::Anomalous => "anomalous",
        }
    }
}

/// Axis-aligned parameter square. `L` is per-square bookkeeping owned by
/// whoever drives the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSquare<L = ()> {
    pub center: Complex64,
    pub side: f64,
    pub depth: u32,
    status: SquareStatus,
    pub ledger: L,
    pub last_geometry: Option<Geometry>,
}

impl<L> ParamSquare<L> {
    pub fn new(center: Complex64, side: f64, depth: u32, ledger: L) -> Self {
        Self { center, side, depth, status: SquareStatus::Active, ledger, last_geometry: None }
    }

    pub fn status(&self) -> SquareStatus {
        self.status
    }

    /// Moves an active square to a terminal status. Terminal statuses are final.
    pub fn set_status(&mut self, s: SquareStatus) {
        assert!(
            self.status == SquareStatus::Active || self.status == s,
            "status {:?} -> {:?} is not monotone",
            self.status,
            s
        );
        self.status = s;
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// Quarter centers in NW, NE, SW, SE order.
    pub fn child_centers(&self) -> [Complex64; 4] {
        let q = self.side / 4.0;
        [
            self.center + Complex64::new(-q, q),
            self.center + Complex64::new(q, q),
            self.center + Complex64::new(-q, -q),
            self.center + Complex64::new(q, -q),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTree<L = ()> {
    nodes: Vec<ParamSquare<L>>,
    children: Vec<Option<[usize; 4]>>,
}

#[derive(Serialize)]
struct NodeLine {
    center_re: f64,
    center_im: f64,
    side: f64,
    depth: u32,
    status: SquareStatus,
    last_k: Option<usize>,
}

impl<L: Clone + Default> PartitionTree<L> {
    /// Tree over the square of side `side` centered at `center`.
    pub fn new(center: Complex64, side: f64) -> Self {
        Self::from_square(ParamSquare::new(center, side, 0, L::default()))
    }

    /// Subtree rooted at an existing square (depth kept).
    pub fn from_square(root: ParamSquare<L>) -> Self {
        Self { nodes: vec![root], children: vec![None] }
    }

    pub const ROOT: usize = 0;

    pub fn node(&self, i: usize) -> &ParamSquare<L> {
        &self.nodes[i]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut ParamSquare<L> {
        &mut self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, i: usize) -> Option<[usize; 4]> {
        self.children[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_none()
    }

    /// Splits an active leaf into four equal quarters; children inherit the ledger.
    pub fn split(&mut self, i: usize) -> [usize; 4] {
        assert!(self.is_leaf(i), "node {i} already split");
        assert_eq!(self.nodes[i].status, SquareStatus::Active, "only active squares split");
        let parent = &self.nodes[i];
        let side = parent.side / 2.0;
        let depth = parent.depth + 1;
        let ledger = parent.ledger.clone();
        let centers = parent.child_centers();
        let first = self.nodes.len();
        for c in centers {
            self.nodes.push(ParamSquare::new(c, side, depth, ledger.clone()));
            self.children.push(None);
        }
        let ids = [first, first + 1, first + 2, first + 3];
        self.children[i] = Some(ids);
        ids
    }

    /// Drops every node created after `mark` and unsplits `i`. Only valid
    /// when all of them descend from `i`.
    pub(crate) fn rollback(&mut self, i: usize, mark: usize) {
        self.nodes.truncate(mark);
        self.children.truncate(mark);
        self.children[i] = None;
    }

    /// Leaves under `i` in NW, NE, SW, SE depth-first order.
    pub fn leaves_under(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(n) = stack.pop() {
            match self.children[n] {
                None => out.push(n),
                Some(ch) => stack.extend(ch.iter().rev()),
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.leaves_under(Self::ROOT)
    }

    pub fn area_with_status(&self, s: SquareStatus) -> f64 {
        self.leaves().iter().map(|&i| &self.nodes[i]).filter(|n| n.status == s).map(|n| n.area()).fold(0.0, |a, b| a + b)
    }

    pub fn leaf_area(&self) -> f64 {
        self.leaves().iter().map(|&i| self.nodes[i].area()).fold(0.0, |a, b| a + b)
    }

    /// Replaces leaf `i` by `sub`, whose root must be the same square.
    pub fn graft(&mut self, i: usize, sub: PartitionTree<L>) {
        assert!(self.is_leaf(i), "graft target must be a leaf");
        assert_eq!(sub.nodes[0].center, self.nodes[i].center);
        assert_eq!(sub.nodes[0].side, self.nodes[i].side);
        let offset = self.nodes.len() - 1;
        let map = |j: usize| if j == 0 { i } else { j + offset };
        let mut nodes = sub.nodes.into_iter();
        let mut kids = sub.children.into_iter();
        self.nodes[i] = nodes.next().unwrap();
        self.children[i] = kids.next().unwrap().map(|c| c.map(map));
        for (n, c) in nodes.zip(kids) {
            self.nodes.push(n);
            self.children.push(c.map(|c| c.map(map)));
        }
    }

    /// One JSON object per node, depth-first in quadrant order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut stack = vec![Self::ROOT];
        while let Some(n) = stack.pop() {
            let sq = &self.nodes[n];
            let line = NodeLine {
                center_re: sq.center.re,
                center_im: sq.center.im,
                side: sq.side,
                depth: sq.depth,
                status: sq.status,
                last_k: sq.last_geometry.map(|g| g.k),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
            if let Some(ch) = self.children[n] {
                stack.extend(ch.iter().rev());
            }
        }
        Ok(())
    }
}
