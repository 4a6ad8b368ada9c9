use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// An integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i32,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid half-integer {0:?}: expected an integer or p/2")]
pub struct ParseHalfIntError(String);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub const fn from_int(n: i32) -> Self {
        Self { twice: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// `(j, m)` is a valid angular momentum / projection pair.
    pub fn is_valid_projection(j: HalfInt, m: HalfInt) -> bool {
        j.twice >= 0 && m.twice.abs() <= j.twice && (j.twice - m.twice) % 2 == 0
    }

    /// The projections `j, j-1, ..., -j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.twice;
        (0..=j.max(-1)).map(move |r| HalfInt::from_twice(j - 2 * r))
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseHalfIntError(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            None => t.parse::<i32>().map(HalfInt::from_int).map_err(|_| err()),
            Some((num, "2")) => num.trim().parse::<i32>().map(HalfInt::from_twice).map_err(|_| err()),
            Some(_) => Err(err()),
        }
    }
}
