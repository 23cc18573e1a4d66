use ce_returns::ReturnKind;
use serde::Serialize;

use crate::RunConstants;

/// Per-square promotion bookkeeping. Index `j` refers to the free return `nu_j`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PromotionLedger {
    pub nu: Vec<usize>,
    pub alpha_tilde: Vec<f64>,
    pub gamma_under: Vec<f64>,
    /// `sup alpha_{nu_j}` over the square that is a partition element at `nu_j`.
    pub sup_alpha: Vec<f64>,
    /// Set-level bound period after `nu_j`.
    pub bound: Vec<usize>,
    #[serde(skip)]
    pub kinds: Vec<Option<ReturnKind>>,
    pub deleted_fraction_at: Vec<(usize, f64)>,
    /// `nu_J`, the first return with `alpha_tilde <= C~ gamma_under`.
    pub promoted_at: Option<usize>,
}

/// `(alpha_tilde, gamma_under, ell)` at the next free return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerUpdate {
    pub alpha_tilde: f64,
    pub gamma_under: f64,
    pub ell: usize,
}

/// `alpha~_{nu_{j+1}} = kappa' (nu_j / nu_{j+1}) sup alpha_{nu_j}`.
pub fn next_alpha_tilde(kappa_prime: f64, nu_j: usize, nu_next: usize, sup_alpha: f64) -> f64 {
    kappa_prime * (nu_j as f64 / nu_next as f64) * sup_alpha
}

/// `gamma_{nu_{j+1}} = (gamma_{nu_j} + gamma_H ell_j / nu_j) nu_j / (nu_{j+1} - 1)`.
pub fn next_gamma_under(gamma_under: f64, gamma_h: f64, ell: usize, nu_j: usize, nu_next: usize) -> f64 {
    let nj = nu_j as f64;
    (gamma_under + gamma_h * ell as f64 / nj) * nj / (nu_next as f64 - 1.0)
}

/// Starting exponent at `nu_0 = N`:
/// `inf gamma_{N-1} - (d-1) sup alpha_N - log d / N`.
pub fn initial_gamma_under(inf_gamma_before: f64, sup_alpha: f64, d: u32, n: usize) -> f64 {
    inf_gamma_before - f64::from(d - 1) * sup_alpha - f64::from(d).ln() / n as f64
}

impl PromotionLedger {
    /// Ledger at `nu_0 = n` with `alpha~_{nu_0} = sup alpha_N`.
    pub fn start(n: usize, sup_alpha: f64, gamma_under: f64, bound: usize, c_tilde: f64) -> Self {
        let mut l = Self {
            nu: vec![n],
            alpha_tilde: vec![sup_alpha],
            gamma_under: vec![gamma_under],
            sup_alpha: vec![sup_alpha],
            bound: vec![bound],
            kinds: vec![None],
            ..Self::default()
        };
        l.check_promotion(c_tilde);
        l
    }

    pub fn last_nu(&self) -> usize {
        *self.nu.last().expect("ledger is empty")
    }

    /// Arithmetic of one step; the ledger itself is unchanged.
    pub fn step(&self, nu_next: usize, k: &RunConstants) -> LedgerUpdate {
        let j = self.nu.len() - 1;
        let nu_j = self.nu[j];
        let ell = nu_next - (nu_j + self.bound[j] + 1);
        LedgerUpdate {
            alpha_tilde: next_alpha_tilde(k.kappa_prime, nu_j, nu_next, self.sup_alpha[j]),
            gamma_under: next_gamma_under(self.gamma_under[j], k.gamma_h, ell, nu_j, nu_next),
            ell,
        }
    }

    /// Appends the return at `nu_next`. `sup_alpha`/`bound` for it stay
    /// provisional until `set_return_data`.
    pub fn push(&mut self, nu_next: usize, kind: ReturnKind, k: &RunConstants) -> LedgerUpdate {
        let u = self.step(nu_next, k);
        self.nu.push(nu_next);
        self.alpha_tilde.push(u.alpha_tilde);
        self.gamma_under.push(u.gamma_under);
        self.sup_alpha.push(f64::NAN);
        self.bound.push(0);
        self.kinds.push(Some(kind));
        self.check_promotion(k.c_tilde);
        u
    }

    /// Records the square's own `sup alpha` and bound period at the last return.
    pub fn set_return_data(&mut self, sup_alpha: f64, bound: usize) {
        *self.sup_alpha.last_mut().unwrap() = sup_alpha;
        *self.bound.last_mut().unwrap() = bound;
    }

    fn check_promotion(&mut self, c_tilde: f64) {
        if self.promoted_at.is_none() {
            if let Some(j) = promotion_end(self, c_tilde) {
                self.promoted_at = Some(self.nu[j]);
            }
        }
    }
}

/// Smallest `J` with `alpha~_{nu_J} <= C~ gamma_{nu_J}`.
pub fn promotion_end(ledger: &PromotionLedger, c_tilde: f64) -> Option<usize> {
    ledger
        .alpha_tilde
        .iter()
        .zip(&ledger.gamma_under)
        .position(|(&a, &g)| a <= c_tilde * g)
}

/// Recomputes `alpha~` and `gamma` for `j >= 1` from the recorded times,
/// sups and bound periods.
pub fn replay(ledger: &PromotionLedger, k: &RunConstants) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![ledger.alpha_tilde[0]];
    let mut g = vec![ledger.gamma_under[0]];
    for j in 1..ledger.nu.len() {
        let (nu_j, nu_next) = (ledger.nu[j - 1], ledger.nu[j]);
        let ell = nu_next - (nu_j + ledger.bound[j - 1] + 1);
        a.push(next_alpha_tilde(k.kappa_prime, nu_j, nu_next, ledger.sup_alpha[j - 1]));
        g.push(next_gamma_under(g[j - 1], k.gamma_h, ell, nu_j, nu_next));
    }
    (a, g)
}
