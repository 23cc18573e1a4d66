use ce_dynamics::{default_escape_radius, Complex64};

use crate::PartitionError;

/// Sampled stand-in for `diam xi_k(A)` and `dist(xi_k(A), 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub diam: f64,
    /// `max(0, min |xi_k| - diam/2)`.
    pub dist: f64,
    /// Smallest sampled `|xi_k|`.
    pub min_modulus: f64,
    /// Largest sampled `|xi_k|`.
    pub max_modulus: f64,
    pub k: usize,
}

impl Geometry {
    pub fn from_images(images: &[Complex64], k: usize) -> Self {
        let mut diam: f64 = 0.0;
        for (i, a) in images.iter().enumerate() {
            for b in &images[i + 1..] {
                diam = diam.max((a - b).norm());
            }
        }
        let min_modulus = images.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let max_modulus = images.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Self { diam, dist: (min_modulus - diam / 2.0).max(0.0), min_modulus, max_modulus, k }
    }
}

/// Corners (NW, NE, SW, SE), the center, then a `grid x grid` interior lattice.
pub fn sample_points(center: Complex64, side: f64, grid: usize) -> Vec<Complex64> {
    let h = side / 2.0;
    let mut pts = vec![
        center + Complex64::new(-h, h),
        center + Complex64::new(h, h),
        center + Complex64::new(-h, -h),
        center + Complex64::new(h, -h),
        center,
    ];
    for i in 0..grid {
        for j in 0..grid {
            let u = (i as f64 + 1.0) / (grid as f64 + 1.0) - 0.5;
            let v = 0.5 - (j as f64 + 1.0) / (grid as f64 + 1.0);
            pts.push(center + Complex64::new(u * side, v * side));
        }
    }
    pts
}

/// Parameter-to-image map at time `k`; `None` once the parameter has escaped.
pub trait ImageMap: Sync {
    fn image(&self, c: Complex64, k: usize) -> Option<Complex64>;
}

/// `c -> xi_k(c)` for `z^d + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyMap {
    pub d: u32,
}

impl ImageMap for FamilyMap {
    fn image(&self, c: Complex64, k: usize) -> Option<Complex64> {
        let radius = default_escape_radius(self.d, c);
        let mut z = Complex64::new(0.0, 0.0);
        for _ in 0..k {
            z = z.powu(self.d) + c;
            if z.norm() > radius {
                return None;
            }
        }
        Some(z)
    }
}

pub fn image_geometry<M: ImageMap + ?Sized>(
    map: &M,
    center: Complex64,
    side: f64,
    k: usize,
    grid: usize,
) -> Result<Geometry, PartitionError> {
    let images = sample_points(center, side, grid)
        .into_iter()
        .map(|c| map.image(c, k).ok_or(PartitionError::SampleEscaped { k }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Geometry::from_images(&images, k))
}

/// Sample orbits of one square advanced in lockstep.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOrbits {
    pub d: u32,
    pub params: Vec<Complex64>,
    pub points: Vec<Complex64>,
    radii: Vec<f64>,
    pub k: usize,
    /// Set once any sample has left its escape radius.
    pub escaped_at: Option<usize>,
}

impl SampleOrbits {
    pub fn new(d: u32, center: Complex64, side: f64, grid: usize) -> Self {
        let params = sample_points(center, side, grid);
        let radii = params.iter().map(|&c| default_escape_radius(d, c)).collect();
        let points = vec![Complex64::new(0.0, 0.0); params.len()];
        Self { d, params, points, radii, k: 0, escaped_at: None }
    }

    /// Advances every sample one step. Escaped samples keep their last point.
    pub fn advance(&mut self) {
        self.k += 1;
        for ((z, &c), &r) in self.points.iter_mut().zip(&self.params).zip(&self.radii) {
            if z.norm() > r {
                continue;
            }
            *z = z.powu(self.d) + c;
            if z.norm() > r && self.escaped_at.is_none() {
                self.escaped_at = Some(self.k);
            }
        }
    }

    pub fn geometry(&self) -> Result<Geometry, PartitionError> {
        match self.escaped_at {
            Some(_) => Err(PartitionError::SampleEscaped { k: self.k }),
            None => Ok(Geometry::from_images(&self.points, self.k)),
        }
    }

    /// Index of the center sample.
    pub const CENTER: usize = 4;

    pub fn center_point(&self) -> Complex64 {
        self.points[Self::CENTER]
    }
}
