//! Conservative interval arithmetic over exact rationals.
//!
//! A `BoundedReal` is a midpoint with a nonnegative radius; every operation
//! widens the radius so the true value stays inside. Used wherever an
//! infinite product or series is truncated — all finite parts of the
//! computations stay exact rationals and never pass through here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedReal {
    midpoint: BigRational,
    radius: BigRational,
}

impl BoundedReal {
    pub fn new(midpoint: BigRational, radius: BigRational) -> Self {
        assert!(!radius.is_negative(), "radius must be nonnegative");
        BoundedReal { midpoint, radius }
    }

    /// An exact value: radius zero.
    pub fn exact(value: BigRational) -> Self {
        BoundedReal { midpoint: value, radius: BigRational::zero() }
    }

    pub fn exact_int(value: i64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn midpoint(&self) -> &BigRational {
        &self.midpoint
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn lower(&self) -> BigRational {
        &self.midpoint - &self.radius
    }

    pub fn upper(&self) -> BigRational {
        &self.midpoint + &self.radius
    }

    pub fn contains(&self, value: &BigRational) -> bool {
        &self.lower() <= value && value <= &self.upper()
    }

    /// Whether the two intervals intersect; the correct notion of
    /// "equality" after independent truncations.
    pub fn consistent_with(&self, other: &BoundedReal) -> bool {
        (&self.midpoint - &other.midpoint).abs() <= &self.radius + &other.radius
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        BoundedReal {
            midpoint: &self.midpoint * factor,
            radius: &self.radius * factor.abs(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint)
    }

    pub fn radius_f64(&self) -> f64 {
        rational_to_f64(&self.radius)
    }
}

/// Round-to-nearest conversion good to f64 precision, safe for the
/// huge numerators exact rationals accumulate.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    // Scale by 2^64 in integer arithmetic, then sum base-2^64 digits as
    // floats; avoids overflow for arbitrarily large rationals.
    let scaled: BigInt = (x.numer().clone() << 64u32) / x.denom();
    let mut approx = 0.0f64;
    let mut place = 1.0f64;
    for digit in scaled.magnitude().to_u64_digits() {
        approx += digit as f64 * place;
        place *= 1.8446744073709552e19; // 2^64
    }
    let approx = approx / 1.8446744073709552e19;
    if x.is_negative() {
        -approx
    } else {
        approx
    }
}

impl Add for BoundedReal {
    type Output = BoundedReal;
    fn add(self, rhs: BoundedReal) -> BoundedReal {
        BoundedReal {
            midpoint: self.midpoint + rhs.midpoint,
            radius: self.radius + rhs.radius,
        }
    }
}

impl Sub for BoundedReal {
    type Output = BoundedReal;
    fn sub(self, rhs: BoundedReal) -> BoundedReal {
        BoundedReal {
            midpoint: self.midpoint - rhs.midpoint,
            radius: self.radius + rhs.radius,
        }
    }
}

impl Neg for BoundedReal {
    type Output = BoundedReal;
    fn neg(self) -> BoundedReal {
        BoundedReal { midpoint: -self.midpoint, radius: self.radius }
    }
}

impl Mul for BoundedReal {
    type Output = BoundedReal;
    fn mul(self, rhs: BoundedReal) -> BoundedReal {
        // (m1 +- r1)(m2 +- r2): worst case |m1|r2 + |m2|r1 + r1 r2.
        let radius = self.midpoint.abs() * &rhs.radius
            + rhs.midpoint.abs() * &self.radius
            + &self.radius * &rhs.radius;
        BoundedReal { midpoint: self.midpoint * rhs.midpoint, radius }
    }
}

impl fmt::Display for BoundedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} ± {:.3e}", self.to_f64(), self.radius_f64())
    }
}
