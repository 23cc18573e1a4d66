//! Quadtree of parameter squares, sampled image geometry and the
//! partition-element tests.

mod geometry;
mod predicates;
mod refine;
mod tree;

pub use geometry::{image_geometry, sample_points, FamilyMap, Geometry, ImageMap, SampleOrbits};
pub use predicates::{classify_return_set, compliant_at, is_partition_element, lower_bound_scale};
pub use refine::{effective_depth_limit, refine_at_essential_return, RefineOptions};
pub use tree::{ParamSquare, PartitionTree, SquareStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("a sample escaped at time {k}")]
    SampleEscaped { k: usize },
    #[error("refinement hit the depth limit {limit}")]
    DepthLimit { limit: u32 },
}
