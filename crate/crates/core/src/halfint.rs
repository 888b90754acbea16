//! Exact half-integer quantum numbers.
//!
//! Spins and projections are stored as twice their value so that every
//! comparison and sum is exact.

use core::fmt;
use core::ops::{Add, Neg, Sub};
use core::str::FromStr;

use crate::error::{Error, Result};

/// A number `k/2` with integer `k`, stored as `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt { twice: 2 * value }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    /// `l(l+1)` as a float, the eigenvalue of the squared spin operator.
    pub fn casimir(self) -> f64 {
        let l = self.value();
        l * (l + 1.0)
    }

    /// Same parity of the twice-values, i.e. `self - other` is an integer.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }

    /// Iterates `-self, -self + 1, ..., self`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let l = self.twice;
        (0..=l.max(-1)).map(move |k| HalfInt::from_twice(-l + 2 * k))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() { write!(f, "{}", self.twice / 2) } else { write!(f, "{}/2", self.twice) }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3/2"`, `"-1/2"`, `"1"` and `"2/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidLabel(alloc::format!("not a half-integer: {s:?}"));
        match s.split_once('/') {
            Some((num, den)) => {
                if den.trim() != "2" {
                    return Err(bad());
                }
                let twice: i32 = num.trim().parse().map_err(|_| bad())?;
                Ok(HalfInt::from_twice(twice))
            }
            None => {
                let v: i32 = s.parse().map_err(|_| bad())?;
                v.checked_mul(2).map(HalfInt::from_twice).ok_or_else(bad)
            }
        }
    }
}

/// A total spin `l` together with its projection `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinLabel {
    pub l: HalfInt,
    pub m: HalfInt,
}

impl SpinLabel {
    pub fn new(l: HalfInt, m: HalfInt) -> Result<Self> {
        check_spin(l)?;
        check_projection(l, m)?;
        Ok(SpinLabel { l, m })
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}, {}>", self.l, self.m)
    }
}

pub(crate) fn check_spin(l: HalfInt) -> Result<()> {
    if l.twice < 0 {
        return Err(Error::NegativeSpin(l));
    }
    Ok(())
}

pub(crate) fn check_projection(l: HalfInt, m: HalfInt) -> Result<()> {
    if !l.same_parity(m) {
        return Err(Error::ParityMismatch { l, m });
    }
    if m.abs() > l {
        return Err(Error::ProjectionOutOfRange { l, m });
    }
    Ok(())
}
