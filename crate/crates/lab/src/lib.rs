//! Scenario files, run directories and verification suites behind the
//! `ce-lab` binary.

pub mod pipeline;
pub mod scenario;
pub mod verify;

use ce_exclusion::ExclusionError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{0}")]
    Startup(String),
    #[error("{0}")]
    Constants(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// 2 usage, 3 numeric, 4 start-up, 5 constants. I/O problems are usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Io(_) => 2,
            LabError::Numeric(_) => 3,
            LabError::Startup(_) => 4,
            LabError::Constants(_) => 5,
        }
    }
}

impl From<ExclusionError> for LabError {
    fn from(e: ExclusionError) -> Self {
        match e {
            ExclusionError::StartupFailed { .. } => LabError::Startup(e.to_string()),
            ExclusionError::InvalidConstants { .. } => LabError::Constants(e.to_string()),
            _ => LabError::Numeric(e.to_string()),
        }
    }
}

impl From<ce_dynamics::DynamicsError> for LabError {
    fn from(e: ce_dynamics::DynamicsError) -> Self {
        LabError::Numeric(e.to_string())
    }
}

impl From<ce_density::DensityError> for LabError {
    fn from(e: ce_density::DensityError) -> Self {
        LabError::Numeric(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.into())
    }
}

/// Parses `RE,IM`.
pub fn parse_complex(s: &str) -> Result<ce_dynamics::Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(ce_dynamics::Complex64::new(p(re)?, p(im)?))
}
