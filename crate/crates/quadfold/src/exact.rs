//! Exact arithmetic for test expectations and Fourier coefficients.
//!
//! Everything computed per test triple is a dyadic rational with a bounded
//! exponent, so [`Dyadic`] keeps an `i128` numerator and a power-of-two
//! denominator and never allocates. Averaging over vertices introduces
//! non-power-of-two denominators (vertex counts, degrees), so aggregates are
//! held as [`Rat`], an arbitrary-precision rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Arbitrary-precision rational used for aggregated expectations.
pub type Rat = BigRational;

/// Exact integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact `n / d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `2^e`, `e` may be negative.
pub fn rat_pow2(e: i64) -> Rat {
    let mag = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

/// Lossy float view of a rational, for report output only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A dyadic rational `num / 2^exp`, normalized so `num` is odd or zero.
///
/// Arithmetic is exact; overflow of the `i128` numerator is a bug in the
/// caller's size accounting and panics.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        Dyadic { num, exp }.normalized()
    }

    /// `1 / 2^exp`.
    pub fn pow2_inv(exp: u32) -> Self {
        Dyadic { num: 1, exp }
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            self.exp = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    pub fn to_rat(&self) -> Rat {
        Rat::new(BigInt::from(self.num), BigInt::one() << self.exp as usize)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 * 2f64.powi(-(self.exp as i32))
    }

    fn aligned(a: Dyadic, b: Dyadic) -> (i128, i128, u32) {
        let exp = a.exp.max(b.exp);
        let an = a.num.checked_shl(exp - a.exp).expect("dyadic overflow");
        let bn = b.num.checked_shl(exp - b.exp).expect("dyadic overflow");
        (an, bn, exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = Dyadic::aligned(self, rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), exp)
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(
            self.num.checked_mul(rhs.num).expect("dyadic overflow"),
            self.exp + rhs.exp,
        )
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(*self, *other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Exact value plus a float view, as emitted into JSON reports.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ExactValue {
    pub num: String,
    pub den: String,
    pub float: f64,
}

impl ExactValue {
    pub fn from_rat(r: &Rat) -> Self {
        ExactValue {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            float: rat_to_f64(r),
        }
    }
}

/// `value <= 2^(-(k/2 + 1))`, decided exactly.
///
/// For odd `k` the bound is irrational, so the comparison squares both sides:
/// nonnegative `x` satisfies `x <= 2^(-(k/2+1))` iff `x^2 <= 2^(-(k+2))`.
pub fn le_half_k_bound(value: &Rat, k: u32) -> bool {
    if value.is_negative() || value.is_zero() {
        return true;
    }
    value * value <= rat_pow2(-(k as i64) - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 9), Dyadic::ZERO);
        assert_eq!(Dyadic::new(6, 1), Dyadic::new(3, 0));
    }

    #[test]
    fn arithmetic_matches_rationals() {
        let a = Dyadic::new(3, 4);
        let b = Dyadic::new(-5, 2);
        assert_eq!((a + b).to_rat(), a.to_rat() + b.to_rat());
        assert_eq!((a - b).to_rat(), a.to_rat() - b.to_rat());
        assert_eq!((a * b).to_rat(), a.to_rat() * b.to_rat());
    }

    #[test]
    fn half_k_bound_odd_k() {
        // 2^(-1.5) sits between 1/4 and 1/2.
        assert!(le_half_k_bound(&rat(1, 4), 1));
        assert!(!le_half_k_bound(&rat(1, 2), 1));
        assert!(le_half_k_bound(&rat(0, 1), 1));
        assert!(le_half_k_bound(&(-rat(7, 8)), 1));
    }

    proptest! {
        #[test]
        fn ops_agree_with_bigrational(an in -1000i128..1000, ae in 0u32..20,
                                      bn in -1000i128..1000, be in 0u32..20) {
            let a = Dyadic::new(an, ae);
            let b = Dyadic::new(bn, be);
            prop_assert_eq!((a + b).to_rat(), a.to_rat() + b.to_rat());
            prop_assert_eq!((a * b).to_rat(), a.to_rat() * b.to_rat());
            prop_assert_eq!(a.cmp(&b), a.to_rat().cmp(&b.to_rat()));
        }
    }
}
