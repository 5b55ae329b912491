//! Supertropical scalars.
//!
//! The carrier is two copies of the rationals, tangible and ghost, plus an
//! infinite element. Addition takes the smaller value and turns ties into
//! ghosts; multiplication adds values and is tangible only when both factors
//! are. Everything is exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, Rat};

/// A value of the tropical semiring: a rational or the infinite element.
///
/// Ordered so that every finite value is below `Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ext {
    Finite(Rat),
    Infinity,
}

impl Ext {
    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinity => None,
        }
    }

    /// Tropical product: ordinary sum with `Infinity` absorbing.
    pub fn plus_value(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            _ => Ext::Infinity,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => f.write_str(&format_rat(v)),
            Ext::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Tangible(Rat),
    Ghost(Rat),
    Infinity,
}

impl Scalar {
    pub fn tangible(v: Rat) -> Self {
        Scalar::Tangible(v)
    }

    pub fn ghost(v: Rat) -> Self {
        Scalar::Ghost(v)
    }

    /// Tangible copy of an integer.
    pub fn t(v: i64) -> Self {
        Scalar::Tangible(crate::rational::int(v))
    }

    /// Ghost copy of an integer.
    pub fn g(v: i64) -> Self {
        Scalar::Ghost(crate::rational::int(v))
    }

    pub fn is_tangible(&self) -> bool {
        matches!(self, Scalar::Tangible(_))
    }

    pub fn is_ghost(&self) -> bool {
        matches!(self, Scalar::Ghost(_))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Scalar::Infinity)
    }

    /// The value with the tangible/ghost flag forgotten.
    pub fn nu(&self) -> Ext {
        match self {
            Scalar::Tangible(v) | Scalar::Ghost(v) => Ext::Finite(v.clone()),
            Scalar::Infinity => Ext::Infinity,
        }
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            Scalar::Tangible(v) | Scalar::Ghost(v) => Some(v),
            Scalar::Infinity => None,
        }
    }

    /// Tangible embedding of a tropical value (`Infinity` stays infinite).
    pub fn from_ext(value: Ext) -> Self {
        match value {
            Ext::Finite(v) => Scalar::Tangible(v),
            Ext::Infinity => Scalar::Infinity,
        }
    }

    /// Supertropical addition.
    pub fn plus(&self, other: &Scalar) -> Scalar {
        match (self.value(), other.value()) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Less => self.clone(),
                Ordering::Greater => other.clone(),
                Ordering::Equal => Scalar::Ghost(a.clone()),
            },
        }
    }

    /// Supertropical multiplication.
    pub fn times(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Infinity, _) | (_, Scalar::Infinity) => Scalar::Infinity,
            (Scalar::Tangible(a), Scalar::Tangible(b)) => Scalar::Tangible(a + b),
            _ => Scalar::Ghost(self.value().unwrap() + other.value().unwrap()),
        }
    }

    /// Ghost surpassing: `self = other`, or `self = other ⊕ g` for a ghost `g`.
    ///
    /// Closed form: equality, or `self` is a ghost whose value is at most
    /// `nu(other)`. In particular every ghost surpasses `Infinity`.
    pub fn ghost_surpasses(&self, other: &Scalar) -> bool {
        if self == other {
            return true;
        }
        match self {
            Scalar::Ghost(c) => match other.nu() {
                Ext::Finite(d) => *c <= d,
                Ext::Infinity => true,
            },
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Tangible(v) => write!(f, "t:{}", format_rat(v)),
            Scalar::Ghost(v) => write!(f, "g:{}", format_rat(v)),
            Scalar::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "inf" {
            return Ok(Scalar::Infinity);
        }
        match text.split_once(':') {
            Some(("t", v)) => Ok(Scalar::Tangible(parse_rat(v)?)),
            Some(("g", v)) => Ok(Scalar::Ghost(parse_rat(v)?)),
            _ => Err(Error::Parse(format!("invalid scalar {text:?}"))),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
