//! Integers extended with a formal positive infinity, for min-plus arithmetic.
//!
//! The unbounded carrier needs exact `min`/`+` with infinity; a large-integer
//! sentinel would silently overflow, so infinity is a distinct variant.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An `i64` or positive infinity. Ordering places every finite value below
/// `Infinity`, which is exactly the min-plus order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MinPlus {
    Finite(i64),
    Infinity,
}

impl MinPlus {
    pub fn is_infinite(self) -> bool {
        self == MinPlus::Infinity
    }

    /// The finite value, if there is one.
    pub fn finite(self) -> Option<i64> {
        match self {
            MinPlus::Finite(n) => Some(n),
            MinPlus::Infinity => None,
        }
    }

    /// Unwraps a value known to be finite from context.
    pub fn expect_finite(self, what: &str) -> i64 {
        match self {
            MinPlus::Finite(n) => n,
            MinPlus::Infinity => panic!("{what} is unexpectedly infinite"),
        }
    }
}

/// Minimum of three values; avoids sprinkling `.min(..).min(..)` chains.
pub fn min3<T: Ord>(a: T, b: T, c: T) -> T {
    a.min(b).min(c)
}

impl From<i64> for MinPlus {
    fn from(n: i64) -> Self {
        MinPlus::Finite(n)
    }
}

impl From<u32> for MinPlus {
    fn from(n: u32) -> Self {
        MinPlus::Finite(i64::from(n))
    }
}

impl Add for MinPlus {
    type Output = MinPlus;

    fn add(self, rhs: MinPlus) -> MinPlus {
        match (self, rhs) {
            (MinPlus::Finite(a), MinPlus::Finite(b)) => MinPlus::Finite(a + b),
            _ => MinPlus::Infinity,
        }
    }
}

impl Add<i64> for MinPlus {
    type Output = MinPlus;

    fn add(self, rhs: i64) -> MinPlus {
        self + MinPlus::Finite(rhs)
    }
}

/// Subtraction of a finite value; infinity absorbs it.
impl Sub<i64> for MinPlus {
    type Output = MinPlus;

    fn sub(self, rhs: i64) -> MinPlus {
        match self {
            MinPlus::Finite(a) => MinPlus::Finite(a - rhs),
            MinPlus::Infinity => MinPlus::Infinity,
        }
    }
}

impl fmt::Display for MinPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinPlus::Finite(n) => write!(f, "{n}"),
            MinPlus::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("expected an integer or \"inf\", got {0:?}")]
pub struct ParseMinPlusError(pub String);

impl FromStr for MinPlus {
    type Err = ParseMinPlusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(MinPlus::Infinity);
        }
        t.parse::<i64>()
            .map(MinPlus::Finite)
            .map_err(|_| ParseMinPlusError(s.to_owned()))
    }
}

// JSON carries capacities as a bare number or the string "inf".
impl Serialize for MinPlus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MinPlus::Finite(n) => serializer.serialize_i64(*n),
            MinPlus::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MinPlus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = MinPlus;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or the string \"inf\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<MinPlus, E> {
                Ok(MinPlus::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<MinPlus, E> {
                i64::try_from(v)
                    .map(MinPlus::Finite)
                    .map_err(|_| E::custom("capacity out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<MinPlus, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(MinPlus::Finite(i64::MAX) < MinPlus::Infinity);
        assert!(MinPlus::Finite(-1) < MinPlus::Finite(0));
        assert_eq!(
            min3(MinPlus::Finite(4), MinPlus::Infinity, MinPlus::Finite(2)),
            MinPlus::Finite(2)
        );
    }

    #[test]
    fn arithmetic_absorbs_infinity() {
        assert_eq!(MinPlus::Finite(2) + MinPlus::Finite(3), MinPlus::Finite(5));
        assert_eq!(MinPlus::Infinity + MinPlus::Finite(3), MinPlus::Infinity);
        assert_eq!(MinPlus::Infinity + 7, MinPlus::Infinity);
        assert_eq!(MinPlus::Finite(5) - 2, MinPlus::Finite(3));
        assert_eq!(MinPlus::Infinity - 100, MinPlus::Infinity);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["inf", "0", "-3", "12"] {
            let v: MinPlus = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("INF".parse::<MinPlus>().unwrap(), MinPlus::Infinity);
        assert!("two".parse::<MinPlus>().is_err());
    }

    #[test]
    fn serde_uses_bare_number_or_inf_string() {
        assert_eq!(serde_json::to_string(&MinPlus::Finite(3)).unwrap(), "3");
        assert_eq!(
            serde_json::to_string(&MinPlus::Infinity).unwrap(),
            "\"inf\""
        );
        assert_eq!(
            serde_json::from_str::<MinPlus>("\"inf\"").unwrap(),
            MinPlus::Infinity
        );
        assert_eq!(
            serde_json::from_str::<MinPlus>("-4").unwrap(),
            MinPlus::Finite(-4)
        );
    }
}
