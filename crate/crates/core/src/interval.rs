//! Closed intervals over `f64` with outward rounding.
//!
//! Every arithmetic result is computed in round-to-nearest and then widened
//! by one unit in the last place on each side, so the returned interval
//! always encloses the exact real result. Transcendental functions are
//! widened by a few ulps to absorb the error of the platform `libm`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Arithmetic shared by plain floats and intervals, enough to evaluate the
/// polynomial closure and its derivatives generically.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn sqr(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

// libm sin/cos are not correctly rounded; four ulps covers every
// mainstream implementation by a wide margin.
const TRIG_ULPS: u32 = 4;

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn down(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        x
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == f64::INFINITY {
        x
    } else {
        x.next_up()
    }
}

fn down_n(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = down(x);
    }
    x
}

fn up_n(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = up(x);
    }
    x
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInput(format!(
                "interval bounds [{lo}, {hi}] are not ordered"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[v, v]`. Exact, no widening.
    pub const fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// `[center - radius, center + radius]`, rounded outward.
    pub fn centered(center: f64, radius: f64) -> Self {
        let r = radius.abs();
        Interval {
            lo: down(center - r),
            hi: up(center + r),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains(0.0) {
            return Err(Error::InvalidInput("interval division by zero".into()));
        }
        let c = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        Ok(Interval {
            lo: down(c.iter().copied().fold(f64::INFINITY, f64::min)),
            hi: up(c.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        })
    }

    fn trig(self, f: fn(f64) -> f64, max_at: f64, min_at: f64) -> Interval {
        use std::f64::consts::TAU;
        if !(self.hi - self.lo < TAU) {
            return Interval { lo: -1.0, hi: 1.0 };
        }
        // An extremum x0 + 2kπ lies inside when some integer k satisfies
        // lo <= x0 + 2kπ <= hi. The test is widened slightly so an extremum
        // sitting on a bound is never missed.
        let hits = |x0: f64| {
            let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
            let kmin = ((self.lo - slack - x0) / TAU).ceil();
            let kmax = ((self.hi + slack - x0) / TAU).floor();
            kmin <= kmax
        };
        let a = f(self.lo);
        let b = f(self.hi);
        let mut lo = down_n(a.min(b), TRIG_ULPS);
        let mut hi = up_n(a.max(b), TRIG_ULPS);
        if hits(max_at) {
            hi = 1.0;
        }
        if hits(min_at) {
            lo = -1.0;
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(v: f64) -> Self {
        Interval::point(v)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo + rhs.lo),
            hi: up(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo - rhs.hi),
            hi: up(self.hi - rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in c {
            // 0 * inf
            let v = if v.is_nan() { 0.0 } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
    }
}

impl Scalar for Interval {
    fn from_f64(v: f64) -> Self {
        Interval::point(v)
    }

    fn sin(self) -> Self {
        use std::f64::consts::FRAC_PI_2;
        self.trig(f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    fn cos(self) -> Self {
        use std::f64::consts::PI;
        self.trig(f64::cos, 0.0, PI)
    }

    fn sqr(self) -> Self {
        let a = self.abs();
        Interval {
            lo: down(a.lo * a.lo).max(0.0),
            hi: up(a.hi * a.hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_arithmetic_encloses_exact() {
        let a = Interval::point(0.1);
        let b = Interval::point(0.2);
        let s = a + b;
        // 0.1 + 0.2 is not representable; the enclosure must straddle it.
        assert!(s.lo() < 0.30000000000000004 && s.hi() > 0.3);
        assert!(s.width() < 1e-15);
    }

    #[test]
    fn rejects_unordered_bounds() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn sqr_of_straddling_interval_is_nonnegative() {
        let x = Interval::new(-2.0, 1.0).unwrap();
        let s = x.sqr();
        assert_eq!(s.lo(), 0.0);
        assert!(s.hi() >= 4.0);
        // naive x*x would give [-2, 4]
        assert!((x * x).lo() < 0.0);
    }

    #[test]
    fn sin_picks_up_interior_maximum() {
        let x = Interval::new(1.0, 2.0).unwrap();
        assert_eq!(x.sin().hi(), 1.0);
        let y = Interval::new(3.0, 3.5).unwrap();
        assert!(y.sin().hi() < 1.0 && y.sin().lo() < 0.0);
    }

    #[test]
    fn cos_of_wide_interval_is_unit() {
        let x = Interval::new(-10.0, 10.0).unwrap();
        assert_eq!(x.cos(), Interval::new(-1.0, 1.0).unwrap());
    }

    #[test]
    fn division_by_zero_interval_fails() {
        let x = Interval::new(1.0, 2.0).unwrap();
        assert!(x.checked_div(Interval::new(-1.0, 1.0).unwrap()).is_err());
        let q = x.checked_div(Interval::point(4.0)).unwrap();
        assert!(q.contains(0.25) && q.contains(0.5));
    }

    fn iv() -> impl Strategy<Value = (f64, f64)> {
        (-1e3f64..1e3, 0.0f64..10.0).prop_map(|(a, w)| (a, a + w))
    }

    proptest! {
        // Inclusion: the image of every sampled point lies in the interval result.
        #[test]
        fn arithmetic_is_inclusion_isotone(a in iv(), b in iv(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let x = Interval::new(a.0, a.1).unwrap();
            let y = Interval::new(b.0, b.1).unwrap();
            let px = a.0 + s * (a.1 - a.0);
            let py = b.0 + t * (b.1 - b.0);
            prop_assert!((x + y).contains(px + py));
            prop_assert!((x - y).contains(px - py));
            prop_assert!((x * y).contains(px * py));
            prop_assert!(x.sqr().contains(px * px));
            prop_assert!(x.sin().contains(px.sin()));
            prop_assert!(x.cos().contains(px.cos()));
        }
    }
}
