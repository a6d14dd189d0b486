use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{two_sum, Scalar};

/// Sign and binary magnitude `sign · 2^log2_mag` of an offset too small to be
/// represented in the scalar type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Infinitesimal {
    pub sign: i8,
    pub log2_mag: f64,
}

impl Infinitesimal {
    pub const NONE: Infinitesimal = Infinitesimal { sign: 0, log2_mag: f64::NEG_INFINITY };

    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.log2_mag.total_cmp(&other.log2_mag),
                _ => other.log2_mag.total_cmp(&self.log2_mag),
            },
            o => o,
        }
    }
}

/// Interval endpoint `hi + lo + inf`: a double-word value plus an optional
/// infinitesimal. Leveled bases place endpoints at `k·2^{-l} ± ε_n` where
/// `ε_n` underflows quickly; keeping the offset symbolically preserves the
/// exact order of endpoints and points at every depth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Endpoint<T> {
    pub hi: T,
    pub lo: T,
    pub inf: Infinitesimal,
}

impl<T: Scalar> Endpoint<T> {
    pub fn exact(v: T) -> Self {
        Endpoint { hi: v, lo: T::zero(), inf: Infinitesimal::NONE }
    }

    /// `anchor + sign·2^{log2_mag}`; the offset is kept exactly when it is
    /// representable and symbolically otherwise.
    pub fn offset(anchor: T, sign: i8, log2_mag: f64) -> Self {
        if sign == 0 {
            return Self::exact(anchor);
        }
        let mag = T::lit(2.0).powf(T::lit(log2_mag.max(-2000.0)));
        let min_normal = T::min_positive_value();
        if mag >= min_normal && mag.is_finite() {
            let off = if sign > 0 { mag } else { -mag };
            let (hi, lo) = two_sum(anchor, off);
            Endpoint { hi, lo, inf: Infinitesimal::NONE }
        } else {
            Endpoint { hi: anchor, lo: T::zero(), inf: Infinitesimal { sign: sign.signum(), log2_mag } }
        }
    }

    /// Nearest scalar value.
    pub fn value(&self) -> T {
        self.hi + self.lo
    }

    /// Sign of `(self - value())`, i.e. which side of the rounded value the
    /// exact endpoint lies on.
    fn residual_sign(&self) -> i8 {
        let r = self.lo - (self.value() - self.hi);
        if r > T::zero() {
            1
        } else if r < T::zero() {
            -1
        } else {
            self.inf.sign
        }
    }

    /// Representable value guaranteed to lie on the interior side of this
    /// endpoint (`inward = +1` means towards larger values).
    pub fn inner_value(&self, inward: i8) -> T {
        let v = self.value();
        let s = self.residual_sign();
        if s != inward {
            v
        } else {
            let step = (v.abs() + T::min_positive_value()) * T::epsilon();
            if inward > 0 { v + step } else { v - step }
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        match self.hi.partial_cmp(&other.hi).unwrap_or(Ordering::Equal) {
            Ordering::Equal => match self.lo.partial_cmp(&other.lo).unwrap_or(Ordering::Equal) {
                Ordering::Equal => self.inf.cmp(&other.inf),
                o => o,
            },
            o => o,
        }
    }

    /// Order of the plain point `t` relative to this endpoint.
    pub fn cmp_point(&self, t: T) -> Ordering {
        Endpoint::exact(t).cmp_exact(self)
    }
}

/// Subinterval of `[0, 1]` with individually open or closed ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub left: Endpoint<T>,
    pub right: Endpoint<T>,
    pub left_open: bool,
    pub right_open: bool,
}

impl<T: Scalar> Interval<T> {
    pub fn new(left: Endpoint<T>, right: Endpoint<T>, left_open: bool, right_open: bool) -> Result<Self> {
        if left.cmp_exact(&right) != Ordering::Less {
            return domain("interval needs left < right");
        }
        if !(left.value() >= T::zero() && right.value() <= T::one()) {
            return domain("interval must lie inside [0,1]");
        }
        Ok(Interval { left, right, left_open, right_open })
    }

    pub fn open(a: T, b: T) -> Result<Self> {
        Self::new(Endpoint::exact(a), Endpoint::exact(b), true, true)
    }

    pub fn closed(a: T, b: T) -> Result<Self> {
        Self::new(Endpoint::exact(a), Endpoint::exact(b), false, false)
    }

    pub fn contains(&self, t: T) -> bool {
        let l = self.left.cmp_point(t);
        let r = self.right.cmp_point(t);
        let left_ok = l == Ordering::Greater || (l == Ordering::Equal && !self.left_open);
        let right_ok = r == Ordering::Less || (r == Ordering::Equal && !self.right_open);
        left_ok && right_ok
    }

    pub fn closure_contains(&self, t: T) -> bool {
        self.left.cmp_point(t) != Ordering::Less && self.right.cmp_point(t) != Ordering::Greater
    }

    /// Approximate length (exact up to the double-word residuals).
    pub fn length(&self) -> T {
        (self.right.hi - self.left.hi) + (self.right.lo - self.left.lo)
    }

    /// Whether the exact length is strictly below `delta`.
    pub fn length_lt(&self, delta: T) -> bool {
        let len = self.length();
        if len != delta {
            return len < delta;
        }
        // tie at scalar precision: decided by the infinitesimal parts
        let net = self.right.inf.sign as i32 - self.left.inf.sign as i32;
        net < 0
    }

    /// Representable interior bounds `(a, b)` with `[a, b]` inside the closure
    /// and `(a, b)` inside the interval.
    pub fn inner_bounds(&self) -> (T, T) {
        (self.left.inner_value(1), self.right.inner_value(-1))
    }

    /// Approximate distance from `t` to the closure (0 when inside).
    pub fn distance_to_closure(&self, t: T) -> T {
        if self.closure_contains(t) {
            T::zero()
        } else if self.left.cmp_point(t) == Ordering::Less {
            self.left.value() - t
        } else {
            t - self.right.value()
        }
    }
}

/// JSON form of a plain interval (custom bases).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub left: f64,
    pub right: f64,
    #[serde(default = "yes")]
    pub left_open: bool,
    #[serde(default = "yes")]
    pub right_open: bool,
}

fn yes() -> bool {
    true
}

impl IntervalSpec {
    pub fn to_interval<T: Scalar>(&self) -> Result<Interval<T>> {
        Interval::new(
            Endpoint::exact(T::lit(self.left)),
            Endpoint::exact(T::lit(self.right)),
            self.left_open,
            self.right_open,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representable_offsets_are_exact() {
        let e = Endpoint::<f64>::offset(0.5, -1, -70.0);
        assert_eq!(e.hi, 0.5);
        assert_eq!(e.lo, -(2f64.powi(-70)));
        assert_eq!(e.cmp_point(0.5), Ordering::Greater);
        assert_eq!(e.cmp_point(0.4999999), Ordering::Less);
    }

    #[test]
    fn underflowed_offsets_keep_order() {
        let left = Endpoint::<f64>::offset(0.5, -1, -5000.0);
        let right = Endpoint::<f64>::offset(0.5, 1, -6000.0);
        assert_eq!(left.inf.sign, -1);
        assert_eq!(left.cmp_exact(&right), Ordering::Less);
        let iv = Interval::new(left, Endpoint::exact(0.75), true, true).unwrap();
        assert!(iv.contains(0.5));
        let iv2 = Interval::new(Endpoint::exact(0.25), right, true, true).unwrap();
        assert!(iv2.contains(0.5));
        let deeper = Endpoint::<f64>::offset(0.5, 1, -7000.0);
        assert_eq!(deeper.cmp_exact(&right), Ordering::Less);
        let l2 = Endpoint::<f64>::offset(0.5, -1, -7000.0);
        assert_eq!(left.cmp_exact(&l2), Ordering::Less);
    }

    #[test]
    fn open_and_closed_membership() {
        let iv = Interval::<f64>::new(Endpoint::exact(0.0), Endpoint::exact(0.5), false, true).unwrap();
        assert!(iv.contains(0.0));
        assert!(!iv.contains(0.5));
        assert!(iv.closure_contains(0.5));
        assert!(Interval::<f64>::open(0.5, 0.5).is_err());
        assert!(Interval::<f64>::open(0.2, 1.5).is_err());
    }

    #[test]
    fn length_comparison_with_infinitesimals() {
        let iv = Interval::new(Endpoint::<f64>::offset(0.25, -1, -4000.0), Endpoint::exact(0.5), true, true).unwrap();
        assert!(!iv.length_lt(0.25));
        assert!(iv.length_lt(0.2500001));
        let inner = iv.inner_bounds();
        assert!(inner.0 >= 0.25 && inner.1 <= 0.5);
    }
}
