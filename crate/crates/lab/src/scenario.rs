use ce_dynamics::Complex64;
use ce_exclusion::{ConstantChoices, RunConfig};
use ce_returns::CriticalNeighborhoods;
use serde::Serialize;

use crate::{parse_complex, LabError};

/// Everything a `run` needs. Text form is `key = value` per line, `#` comments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub c0_re: f64,
    pub c0_im: f64,
    pub d: u32,
    pub epsilon: f64,
    pub big_delta: f64,
    pub big_delta_prime: f64,
    pub beta: f64,
    pub epsilon1: f64,
    pub kappa_prime: Option<f64>,
    pub kappa_tilde: Option<f64>,
    pub c_tilde: f64,
    pub c1: f64,
    pub alpha: Option<f64>,
    pub n_max: usize,
    pub depth_limit: u32,
    pub sample_grid: usize,
    /// Critical-orbit points used as outside-expansion segment starts.
    pub gamma_h_pool: usize,
    pub gamma_h_segment: usize,
    pub seed: u64,
}

pub const BUILTIN: [&str; 4] = ["cheb-neighborhood", "cheb-tip", "exterior", "recurrent"];

impl Scenario {
    fn base(name: &str, c0: f64, epsilon: f64) -> Self {
        let nb = CriticalNeighborhoods::default();
        let ch = ConstantChoices::default();
        Scenario {
            name: name.into(),
            c0_re: c0,
            c0_im: 0.0,
            d: 2,
            epsilon,
            big_delta: nb.big_delta,
            big_delta_prime: nb.big_delta_prime,
            beta: nb.beta,
            epsilon1: nb.epsilon1,
            kappa_prime: ch.kappa_prime,
            kappa_tilde: ch.kappa_tilde,
            c_tilde: ch.c_tilde,
            c1: ch.c1,
            alpha: ch.alpha,
            n_max: 10_000,
            depth_limit: 48,
            sample_grid: 3,
            gamma_h_pool: 2000,
            gamma_h_segment: 50,
            seed: 0,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            // Real parameter next to -2 whose critical orbit first enters U at 10.
            "cheb-neighborhood" => Self::base(name, -1.99998588181320168, 3e-11),
            "cheb-tip" => Self::base(name, -2.0, 1e-3),
            "exterior" => Self::base(name, 3.0, 0.01),
            "recurrent" => Self { n_max: 3000, ..Self::base(name, -1.60434786802118756, 1e-13) },
            _ => return None,
        })
    }

    /// A built-in name or a path to a scenario file.
    pub fn load(name_or_path: &str) -> Result<Self, LabError> {
        if let Some(s) = Self::builtin(name_or_path) {
            return Ok(s);
        }
        let text = std::fs::read_to_string(name_or_path)
            .map_err(|e| LabError::Usage(format!("scenario {name_or_path:?}: not built in and not readable ({e})")))?;
        Self::parse(&text)
    }

    /// Parses a scenario file. A `base = NAME` line starts from a built-in;
    /// otherwise from `cheb-neighborhood`.
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::Usage(format!("line {}: expected key = value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let base = pairs.iter().find(|(k, _)| k == "base").map_or("cheb-neighborhood", |(_, v)| v.as_str());
        let mut s = Self::builtin(base).ok_or_else(|| LabError::Usage(format!("unknown base scenario {base:?}")))?;
        for (k, v) in pairs.iter().filter(|(k, _)| k != "base") {
            s.set(k, v)?;
        }
        Ok(s)
    }

    /// Applies one `key = value`; also used for `--set` overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), LabError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, LabError>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| LabError::Usage(format!("{key}: {e}")))
        }
        let opt = |v: &str| -> Result<Option<f64>, LabError> {
            if v == "auto" {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        };
        match key {
            "name" => self.name = value.to_string(),
            "c0" => {
                let c = parse_complex(value).map_err(LabError::Usage)?;
                (self.c0_re, self.c0_im) = (c.re, c.im);
            }
            "d" => self.d = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "Delta" => self.big_delta = num(key, value)?,
            "DeltaPrime" => self.big_delta_prime = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "epsilon1" => self.epsilon1 = num(key, value)?,
            "kappa_prime" => self.kappa_prime = opt(value)?,
            "kappa_tilde" => self.kappa_tilde = opt(value)?,
            "C_tilde" => self.c_tilde = num(key, value)?,
            "C1" => self.c1 = num(key, value)?,
            "alpha" => self.alpha = opt(value)?,
            "n_max" => self.n_max = num(key, value)?,
            "depth_limit" => self.depth_limit = num(key, value)?,
            "sample_grid" => self.sample_grid = num(key, value)?,
            "gamma_h_pool" => self.gamma_h_pool = num(key, value)?,
            "gamma_h_segment" => self.gamma_h_segment = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            _ => return Err(LabError::Usage(format!("unknown scenario key {key:?}"))),
        }
        Ok(())
    }

    pub fn c0(&self) -> Complex64 {
        Complex64::new(self.c0_re, self.c0_im)
    }

    pub fn neighborhoods(&self) -> Result<CriticalNeighborhoods, LabError> {
        CriticalNeighborhoods::new(self.big_delta, self.big_delta_prime, self.beta, self.epsilon1)
            .map_err(|e| LabError::Usage(e.to_string()))
    }

    pub fn run_config(&self, gamma_h: f64) -> Result<RunConfig, LabError> {
        if self.d < 2 {
            return Err(LabError::Usage("d must be at least 2".into()));
        }
        if !(self.epsilon > 0.0) || self.n_max == 0 {
            return Err(LabError::Usage("epsilon and n_max must be positive".into()));
        }
        Ok(RunConfig {
            c0: self.c0(),
            d: self.d,
            epsilon: self.epsilon,
            nbhd: self.neighborhoods()?,
            n_max: self.n_max,
            depth_limit: self.depth_limit,
            grid: self.sample_grid,
            choices: ConstantChoices {
                kappa_prime: self.kappa_prime,
                kappa_tilde: self.kappa_tilde,
                c_tilde: self.c_tilde,
                c1: self.c1,
                alpha: self.alpha,
            },
            gamma_h,
        })
    }

    /// Canonical `key = value` text; parsing it gives back the same scenario.
    pub fn to_text(&self) -> String {
        let o = |v: Option<f64>| v.map_or("auto".to_string(), |x| x.to_string());
        format!(
            "name = {}\nc0 = {},{}\nd = {}\nepsilon = {}\nDelta = {}\nDeltaPrime = {}\nbeta = {}\nepsilon1 = {}\n\
             kappa_prime = {}\nkappa_tilde = {}\nC_tilde = {}\nC1 = {}\nalpha = {}\nn_max = {}\ndepth_limit = {}\n\
             sample_grid = {}\ngamma_h_pool = {}\ngamma_h_segment = {}\nseed = {}\n",
            self.name,
            self.c0_re,
            self.c0_im,
            self.d,
            self.epsilon,
            self.big_delta,
            self.big_delta_prime,
            self.beta,
            self.epsilon1,
            o(self.kappa_prime),
            o(self.kappa_tilde),
            self.c_tilde,
            self.c1,
            o(self.alpha),
            self.n_max,
            self.depth_limit,
            self.sample_grid,
            self.gamma_h_pool,
            self.gamma_h_segment,
            self.seed,
        )
    }
}
