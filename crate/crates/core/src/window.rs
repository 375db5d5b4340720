use std::fmt;

use serde::{Deserialize, Serialize};

/// Stand-in for an unbounded window edge.
pub const UNBOUNDED: i32 = 1 << 20;

/// A closed range of cohomological degrees. Empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub const fn new(lo: i32, hi: i32) -> Window {
        Window { lo, hi }
    }

    pub fn empty() -> Window {
        Window { lo: 1, hi: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, d: i32) -> bool {
        self.lo <= d && d <= self.hi
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn shift(&self, n: i32) -> Window {
        Window { lo: self.lo + n, hi: self.hi + n }
    }

    pub fn negate(&self) -> Window {
        Window { lo: -self.hi, hi: -self.lo }
    }

    pub fn shrink_top(&self, n: i32) -> Window {
        Window { lo: self.lo, hi: self.hi - n }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "empty")
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}
