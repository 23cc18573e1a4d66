//! Start-up, initial deletion, promotion and escape bookkeeping over the
//! parameter partition.

mod constants;
mod engine;
mod ledger;
mod orbits;
mod output;
mod startup;
mod stats;

pub use constants::{
    alpha_cap, derive_constants, gamma_c, gamma_i, iota, kappa, kappa_hat, m_tilde, ConstantsInput,
    RunConstants,
};
pub use engine::{
    run, ConstantChoices, InitialDeletion, LeafOutcome, QCheck, ReturnRecord, RunConfig, RunOutput,
    SquareRecord, StopReason,
};
pub use ledger::{
    initial_gamma_under, next_alpha_tilde, next_gamma_under, promotion_end, replay, LedgerUpdate,
    PromotionLedger,
};
pub use output::{write_ledger_csv, write_returns_csv, write_summary_json};
pub use startup::{startup, StartupReport, StartupStatus};
pub use stats::{escape_scan, deletion_bound, EscapeStats, Summary};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExclusionError {
    #[error("invalid constants: {inequality} violated ({detail})")]
    InvalidConstants { inequality: &'static str, detail: String },
    #[error("start-up failed at k={k}: {reason}")]
    StartupFailed { k: usize, reason: String },
    #[error(transparent)]
    Dynamics(#[from] ce_dynamics::DynamicsError),
    #[error(transparent)]
    Partition(#[from] ce_partition::PartitionError),
}
