use ce_dynamics::{default_escape_radius, Complex64};
use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// First `n` with `|xi_n| > R`.
    Escaped(usize),
    /// Still bounded at the budget; possibly in the connectedness locus.
    Undetermined,
}

fn pow_d(z: Complex64, d: u32) -> Complex64 {
    if d == 2 {
        return z * z;
    }
    (1..d).fold(z, |acc, _| acc * z)
}

/// Squared escape radius, from `|c|^2` directly so that `xi_1 = c` is never
/// past it through rounding.
fn escape_radius_sqr(d: u32, c: Complex64) -> f64 {
    let floor = default_escape_radius(d, Complex64::new(0.0, 0.0));
    c.norm_sqr().max(floor * floor)
}

/// Escape test on the critical orbit in double precision.
pub fn membership_sample(c: Complex64, d: u32, n_max: usize) -> Membership {
    let r2 = escape_radius_sqr(d, c);
    let mut z = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        z = pow_d(z, d) + c;
        if z.norm_sqr() > r2 {
            return Membership::Escaped(n);
        }
    }
    Membership::Undetermined
}

#[derive(Clone, Copy)]
struct Cdd {
    re: TwoFloat,
    im: TwoFloat,
}

impl Cdd {
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// Same test with `c = c0 + offset` held in double-double arithmetic.
pub fn membership_sample_extended(c0: Complex64, offset: Complex64, d: u32, n_max: usize) -> Membership {
    let c = Cdd { re: TwoFloat::new_add(c0.re, offset.re), im: TwoFloat::new_add(c0.im, offset.im) };
    let r2 = escape_radius_sqr(d, c0 + offset);
    let zero = TwoFloat::from(0.0);
    let mut z = Cdd { re: zero, im: zero };
    for n in 1..=n_max {
        let mut p = z;
        for _ in 1..d {
            p = p.mul(z);
        }
        z = Cdd { re: p.re + c.re, im: p.im + c.im };
        let (x, y) = (z.re.hi(), z.im.hi());
        if x * x + y * y > r2 {
            return Membership::Escaped(n);
        }
    }
    Membership::Undetermined
}
