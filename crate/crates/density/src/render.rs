use ce_dynamics::Complex64;
use rayon::prelude::*;

use crate::{membership_sample, Membership};

/// Binary PGM (P5) of escape times over `Q(c0, epsilon)`, top row first.
/// Gray level is `min(255, escape time)`; bounded samples are 255.
pub fn render_pgm(c0: Complex64, d: u32, epsilon: f64, width: usize, height: usize, n_max: usize) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    let rows: Vec<Vec<u8>> = (0..height)
        .into_par_iter()
        .map(|row| {
            let v = 0.5 - (row as f64 + 0.5) / height as f64;
            (0..width)
                .map(|col| {
                    let u = (col as f64 + 0.5) / width as f64 - 0.5;
                    let c = c0 + Complex64::new(epsilon * u, epsilon * v);
                    match membership_sample(c, d, n_max) {
                        Membership::Escaped(n) => n.min(255) as u8,
                        Membership::Undetermined => 255,
                    }
                })
                .collect()
        })
        .collect();
    for r in rows {
        out.extend(r);
    }
    out
}
