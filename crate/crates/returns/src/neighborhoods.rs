use ce_dynamics::OrbitRecord;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum NeighborhoodError {
    #[error("need 0 < DeltaPrime < Delta, got DeltaPrime={big_delta_prime}, Delta={big_delta}")]
    Radii { big_delta: f64, big_delta_prime: f64 },
    #[error("beta must be positive, got {0}")]
    Beta(f64),
    #[error("epsilon1 must lie in (0,1), got {0}")]
    Epsilon1(f64),
    #[error("beta {beta} must be below gamma_ref/(4d) = {limit}")]
    BetaTooLarge { beta: f64, limit: f64 },
}

/// The two critical disks `U = D(0, e^{-Delta})`, `U' = D(0, e^{-DeltaPrime})`,
/// the binding exponent and the large scale `S = epsilon1 * delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalNeighborhoods {
    pub big_delta: f64,
    pub big_delta_prime: f64,
    pub beta: f64,
    pub epsilon1: f64,
}

impl Default for CriticalNeighborhoods {
    fn default() -> Self {
        Self { big_delta: 9.0, big_delta_prime: 6.0, beta: 0.01, epsilon1: 0.05 }
    }
}

impl CriticalNeighborhoods {
    pub fn new(
        big_delta: f64,
        big_delta_prime: f64,
        beta: f64,
        epsilon1: f64,
    ) -> Result<Self, NeighborhoodError> {
        if !(big_delta_prime > 0.0 && big_delta_prime < big_delta) {
            return Err(NeighborhoodError::Radii { big_delta, big_delta_prime });
        }
        if !(beta > 0.0) {
            return Err(NeighborhoodError::Beta(beta));
        }
        if !(epsilon1 > 0.0 && epsilon1 < 1.0) {
            return Err(NeighborhoodError::Epsilon1(epsilon1));
        }
        Ok(Self { big_delta, big_delta_prime, beta, epsilon1 })
    }

    pub fn delta(&self) -> f64 {
        (-self.big_delta).exp()
    }

    pub fn delta_prime(&self) -> f64 {
        (-self.big_delta_prime).exp()
    }

    pub fn large_scale(&self) -> f64 {
        self.epsilon1 * self.delta()
    }

    /// Binding exponent must stay below `gamma_ref / (4d)`.
    pub fn check_beta(&self, gamma_ref: f64, d: u32) -> Result<(), NeighborhoodError> {
        let limit = gamma_ref / (4.0 * f64::from(d));
        if self.beta < limit {
            Ok(())
        } else {
            Err(NeighborhoodError::BetaTooLarge { beta: self.beta, limit })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReturnKind {
    ReturnU,
    PseudoReturn,
    FreeReturn,
    InessentialSet,
    EssentialSet,
}

impl ReturnKind {
    pub fn label(self) -> &'static str {
        match self {
            ReturnKind::ReturnU => "return_u",
            ReturnKind::PseudoReturn => "pseudo_return",
            ReturnKind::FreeReturn => "free_return",
            ReturnKind::InessentialSet => "inessential_set",
            ReturnKind::EssentialSet => "essential_set",
        }
    }
}

/// Location of `xi_n` relative to the critical disks. `None` is a non-return.
/// `|xi_n| == delta` counts as `ReturnU`.
pub fn classify_time(orbit: &OrbitRecord, nbhd: &CriticalNeighborhoods, n: usize) -> Option<ReturnKind> {
    classify_modulus(orbit.point(n).norm(), nbhd)
}

pub(crate) fn classify_modulus(m: f64, nbhd: &CriticalNeighborhoods) -> Option<ReturnKind> {
    if m <= nbhd.delta() {
        Some(ReturnKind::ReturnU)
    } else if m < nbhd.delta_prime() {
        Some(ReturnKind::PseudoReturn)
    } else {
        None
    }
}
