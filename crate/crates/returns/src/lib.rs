//! Return classification, bound periods and per-parameter return timelines.

mod bound;
mod export;
mod neighborhoods;
mod timeline;

pub use bound::{bound_period, bound_period_prediction, r_index, BoundPrediction};
pub use export::write_timeline_csv;
pub use neighborhoods::{classify_time, CriticalNeighborhoods, NeighborhoodError, ReturnKind};
pub use timeline::{bound_order_violations, p_lt_n_violations, timeline, ReturnEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    /// Binding still held at the last available index.
    #[error("bound period truncated at {p_so_far}: orbit too short")]
    Truncated { p_so_far: usize },
}
