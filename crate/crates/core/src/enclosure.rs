use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A certified bracket `lo <= value <= hi` for a quantity that is only
/// available through a truncated series or an optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Enclosure<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn point(v: T) -> Self {
        Enclosure { lo: v, hi: v }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn mid(&self) -> T {
        (self.lo + self.hi) / T::lit(2.0)
    }

    pub fn contains(&self, v: T) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn scale(&self, c: T) -> Self {
        if c >= T::zero() {
            Enclosure::new(self.lo * c, self.hi * c)
        } else {
            Enclosure::new(self.hi * c, self.lo * c)
        }
    }
}
