//! Closed real intervals and the few interval-arithmetic operations the
//! certifiers need.

use crate::error::{check_len, Result};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    /// Builds `[lo, hi]`, returning `None` when `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`, with `slack` absolute tolerance on both sides.
    pub fn is_within(&self, other: &Interval, slack: f64) -> bool {
        self.lo >= other.lo - slack && self.hi <= other.hi + slack
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

pub fn interval_add(a: Interval, b: Interval) -> Interval {
    Interval {
        lo: a.lo + b.lo,
        hi: a.hi + b.hi,
    }
}

pub fn interval_scale(a: Interval, c: f64) -> Interval {
    let (p, q) = (c * a.lo, c * a.hi);
    if p <= q {
        Interval { lo: p, hi: q }
    } else {
        Interval { lo: q, hi: p }
    }
}

/// Range of `Σ xᵢ·tᵢ` over all `t` in the box; exact for linear forms.
pub fn interval_dot(boxed: &[Interval], x: &[f64]) -> Result<Interval> {
    check_len("interval_dot", boxed.len(), x.len())?;
    Ok(boxed
        .iter()
        .zip(x)
        .fold(Interval::ZERO, |acc, (b, &xi)| interval_add(acc, interval_scale(*b, xi))))
}
