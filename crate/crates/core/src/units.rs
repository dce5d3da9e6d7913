//! Exact length arithmetic.
//!
//! Every length in an instance has at most two fractional digits when written
//! in meters, so lengths are held as integer centimeters and all capacity
//! tests are integer comparisons. On the wire they are decimal meters.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A length in integer centimeters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Length(i64);

impl Length {
    pub const ZERO: Length = Length(0);

    pub const fn from_cm(cm: i64) -> Self {
        Length(cm)
    }

    pub const fn cm(self) -> i64 {
        self.0
    }

    /// Converts decimal meters, rejecting values that need more than two
    /// fractional digits.
    pub fn from_meters(m: f64) -> Option<Self> {
        if !m.is_finite() {
            return None;
        }
        let scaled = m * 100.0;
        let cm = scaled.round();
        if (scaled - cm).abs() > 1e-6 || cm.abs() > 1e15 {
            return None;
        }
        Some(Length(cm as i64))
    }

    pub fn meters(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.meters())
    }
}

impl Add for Length {
    type Output = Length;
    fn add(self, rhs: Length) -> Length {
        Length(self.0 + rhs.0)
    }
}

impl AddAssign for Length {
    fn add_assign(&mut self, rhs: Length) {
        self.0 += rhs.0;
    }
}

impl Sub for Length {
    type Output = Length;
    fn sub(self, rhs: Length) -> Length {
        Length(self.0 - rhs.0)
    }
}

impl Mul<u32> for Length {
    type Output = Length;
    fn mul(self, rhs: u32) -> Length {
        Length(self.0 * i64::from(rhs))
    }
}

impl Sum for Length {
    fn sum<I: Iterator<Item = Length>>(iter: I) -> Length {
        Length(iter.map(|l| l.0).sum())
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.meters())
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = f64::deserialize(d)?;
        Length::from_meters(m).ok_or_else(|| {
            serde::de::Error::custom(format!(
                "length {m} is not a decimal with at most two fractional digits"
            ))
        })
    }
}

/// Serde adapter writing zero-based indices as one-based numbers.
pub(crate) mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(serde::de::Error::custom("indices are one-based"));
        }
        Ok(v as usize - 1)
    }
}
