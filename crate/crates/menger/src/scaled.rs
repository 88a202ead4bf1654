//! Nonnegative reals stored as `mantissa * 2^exp2` with the mantissa in
//! `[1, 2)` and an `i64` exponent.
//!
//! The dyadic-block constructions go down to scales like `2^(-4^4 * 4^3)`,
//! far below what `f64` can represent, but all the quantities of interest
//! are products, powers and short sums of exact powers of two. Keeping the
//! exponent as an integer makes those operations exact in the exponent and
//! correctly rounded in the mantissa.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Addends more than this many binary orders below the dominant term are
/// dropped: a double mantissa cannot represent them anyway.
const ADD_DROP_BITS: i64 = 80;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScaledReal {
    mantissa: f64,
    exp2: i64,
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exp2: 0,
    };
    pub const ONE: ScaledReal = ScaledReal {
        mantissa: 1.0,
        exp2: 0,
    };

    fn normalized(mut mantissa: f64, mut exp2: i64) -> Self {
        assert!(
            mantissa.is_finite() && mantissa >= 0.0,
            "ScaledReal mantissa must be finite and nonnegative, got {mantissa}"
        );
        if mantissa == 0.0 {
            return ScaledReal::ZERO;
        }
        while mantissa >= 2.0 {
            mantissa /= 2.0;
            exp2 += 1;
        }
        while mantissa < 1.0 {
            mantissa *= 2.0;
            exp2 -= 1;
        }
        ScaledReal { mantissa, exp2 }
    }

    pub fn new(mantissa: f64, exp2: i64) -> Self {
        Self::normalized(mantissa, exp2)
    }

    /// Exactly `2^k`.
    pub fn from_exp2(k: i64) -> Self {
        ScaledReal {
            mantissa: 1.0,
            exp2: k,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite() && v >= 0.0, "ScaledReal from invalid {v}");
        Self::normalized(v, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // split the exponent so each factor stays in powi's safe range,
        // covering the subnormal band as well
        let a = self.exp2.clamp(-1000, 1000);
        let b = self.exp2 - a;
        if b < -200 {
            return 0.0;
        }
        if b > 200 {
            return f64::INFINITY;
        }
        self.mantissa * 2f64.powi(a as i32) * 2f64.powi(b as i32)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ScaledReal::ZERO;
        }
        Self::normalized(self.mantissa * other.mantissa, self.exp2 + other.exp2)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "ScaledReal division by zero");
        if self.is_zero() {
            return ScaledReal::ZERO;
        }
        Self::normalized(self.mantissa / other.mantissa, self.exp2 - other.exp2)
    }

    pub fn recip(&self) -> Self {
        ScaledReal::ONE.div(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp2 >= other.exp2 {
            (self, other)
        } else {
            (other, self)
        };
        let d = hi.exp2 - lo.exp2;
        if d > ADD_DROP_BITS {
            return *hi;
        }
        let m = hi.mantissa + lo.mantissa * 2f64.powi(-(d as i32));
        Self::normalized(m, hi.exp2)
    }

    /// `self - other`, or `None` if the result would be negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        match self.partial_cmp(other) {
            Some(Ordering::Less) => None,
            Some(Ordering::Equal) => Some(ScaledReal::ZERO),
            _ => {
                if other.is_zero() {
                    return Some(*self);
                }
                let d = self.exp2 - other.exp2;
                if d > ADD_DROP_BITS {
                    return Some(*self);
                }
                let m = self.mantissa - other.mantissa * 2f64.powi(-(d as i32));
                Some(Self::normalized(m, self.exp2))
            }
        }
    }

    /// Integer power, exact in the exponent.
    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return ScaledReal::ONE;
        }
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = ScaledReal::ONE;
        let mut base = *self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return ScaledReal::ZERO;
        }
        if self.exp2 % 2 == 0 {
            Self::normalized(self.mantissa.sqrt(), self.exp2 / 2)
        } else {
            Self::normalized((2.0 * self.mantissa).sqrt(), (self.exp2 - 1) / 2)
        }
    }

    pub fn log2(&self) -> f64 {
        assert!(!self.is_zero(), "log2 of zero");
        self.exp2 as f64 + self.mantissa.log2()
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            *self
        } else {
            *other
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            *self
        } else {
            *other
        }
    }
}

impl PartialEq for ScaledReal {
    fn eq(&self, other: &Self) -> bool {
        self.mantissa == other.mantissa && (self.is_zero() || self.exp2 == other.exp2)
    }
}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => match self.exp2.cmp(&other.exp2) {
                Ordering::Equal => self.mantissa.partial_cmp(&other.mantissa),
                ord => Some(ord),
            },
        }
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exp2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_round_trip_is_exact() {
        for k in [-1_000_000_i64, -1074, -3, 0, 5, 999_999] {
            let s = ScaledReal::from_exp2(k);
            assert_eq!(s.mantissa(), 1.0);
            assert_eq!(s.exp2(), k);
            assert_eq!(s.log2(), k as f64);
        }
        let s = ScaledReal::from_f64(0.375);
        assert_eq!(s.mantissa(), 1.5);
        assert_eq!(s.exp2(), -2);
        assert_eq!(s.to_f64(), 0.375);
    }

    #[test]
    fn canonical_zero() {
        let z = ScaledReal::from_f64(0.0);
        assert!(z.is_zero());
        assert_eq!(z.exp2(), 0);
        assert_eq!(z.add(&ScaledReal::ONE), ScaledReal::ONE);
    }

    #[test]
    fn mul_is_exact_in_exponent() {
        let a = ScaledReal::from_exp2(-729);
        let b = ScaledReal::from_exp2(-16384);
        let c = a.mul(&b);
        assert_eq!(c.exp2(), -17113);
        assert_eq!(c.mantissa(), 1.0);
    }

    #[test]
    fn mul_associativity_within_ulp() {
        let a = ScaledReal::new(1.3, -100);
        let b = ScaledReal::new(1.7, 250);
        let c = ScaledReal::new(1.1, -3000);
        let lhs = a.mul(&b).mul(&c);
        let rhs = a.mul(&b.mul(&c));
        assert_eq!(lhs.exp2(), rhs.exp2());
        assert!((lhs.mantissa() - rhs.mantissa()).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn add_drops_far_below_terms() {
        let big = ScaledReal::from_exp2(0);
        let tiny = ScaledReal::from_exp2(-200);
        assert_eq!(big.add(&tiny), big);
        let near = ScaledReal::from_exp2(-1);
        assert_eq!(big.add(&near), ScaledReal::new(1.5, 0));
    }

    #[test]
    fn checked_sub() {
        let a = ScaledReal::from_exp2(-3);
        let b = ScaledReal::from_exp2(-4);
        assert_eq!(a.checked_sub(&b).unwrap(), ScaledReal::from_exp2(-4));
        assert!(b.checked_sub(&a).is_none());
        assert!(a.checked_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn powi_and_sqrt() {
        let a = ScaledReal::from_exp2(-729);
        assert_eq!(a.powi(3).exp2(), -2187);
        assert_eq!(a.powi(-2).exp2(), 1458);
        let s = ScaledReal::from_exp2(-730).sqrt();
        assert_eq!(s.exp2(), -365);
        assert_eq!(s.mantissa(), 1.0);
        let t = ScaledReal::from_exp2(-3).sqrt();
        // sqrt(2^-3) = sqrt(2) * 2^-2
        assert_eq!(t.exp2(), -2);
        assert!((t.mantissa() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ordering() {
        let a = ScaledReal::from_exp2(-10);
        let b = ScaledReal::new(1.9, -11);
        assert!(a > b);
        assert!(ScaledReal::ZERO < b);
    }

    #[test]
    fn to_f64_subnormal_and_overflow() {
        assert_eq!(ScaledReal::from_exp2(-1060).to_f64(), 2f64.powi(-1060));
        assert_eq!(ScaledReal::from_exp2(-20000).to_f64(), 0.0);
        assert!(ScaledReal::from_exp2(20000).to_f64().is_infinite());
    }
}
