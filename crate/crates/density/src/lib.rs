//! Escape-time density of the complement of the connectedness locus near an
//! anchor parameter, plus envelope fits for recurrence and outside expansion.

mod fits;
mod membership;
mod render;
mod sampler;
mod scale;

pub use fits::{initial_recurrence_fit, lower_hull, outside_expansion_estimate, upper_hull, OutsideExpansion, RecurrenceFit};
pub use membership::{membership_sample, membership_sample_extended, Membership};
pub use render::render_pgm;
pub use sampler::Sampler;
pub use scale::{
    density_at_scale, scale_sweep, wilson_interval, write_density_csv, DensityRow, NSchedule, EXTENDED_FLOOR,
    EXTENDED_SWITCH,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DensityError {
    #[error("scale {epsilon:e} is below the extended-precision floor")]
    PrecisionExhausted { epsilon: f64 },
    #[error("no orbit segment avoids the critical neighbourhood")]
    EmptyPool,
}
