use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sample layout over the unit square `[-1/2, 1/2]^2`, row by row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Cell centers of an `n x n` grid.
    Grid { n: usize },
    /// One uniform point per cell of an `n x n` grid. Row `j` draws from
    /// its own ChaCha stream, so rows can be generated in any order.
    Stratified { n: usize, seed: u64 },
}

impl Sampler {
    pub fn side(&self) -> usize {
        match *self {
            Sampler::Grid { n } | Sampler::Stratified { n, .. } => n,
        }
    }

    pub fn samples(&self) -> usize {
        self.side() * self.side()
    }

    /// Offsets `(u, v)` of row `j`; `v` grows with `j`.
    pub fn row(&self, j: usize) -> Vec<(f64, f64)> {
        let n = self.side();
        let nf = n as f64;
        match *self {
            Sampler::Grid { .. } => {
                (0..n).map(|i| ((i as f64 + 0.5) / nf - 0.5, (j as f64 + 0.5) / nf - 0.5)).collect()
            }
            Sampler::Stratified { seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(j as u64);
                (0..n)
                    .map(|i| {
                        let a: f64 = rng.random();
                        let b: f64 = rng.random();
                        ((i as f64 + a) / nf - 0.5, (j as f64 + b) / nf - 0.5)
                    })
                    .collect()
            }
        }
    }
}
