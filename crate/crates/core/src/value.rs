//! The extended half-line `[0, ∞]`, codomain of every monotone.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of `[0, ∞]`.
///
/// Finite values are non-negative and never NaN, so the order is total. No
/// arithmetic is defined; extensions only ever compare values.
#[derive(Debug, Clone, Copy)]
pub enum ExtValue {
    Finite(f64),
    Infinity,
}

impl ExtValue {
    pub const ZERO: ExtValue = ExtValue::Finite(0.0);
    pub const INFINITY: ExtValue = ExtValue::Infinity;

    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Input(format!("{x} is not in [0, inf]")));
        }
        if x.is_infinite() {
            Ok(ExtValue::Infinity)
        } else {
            // -0.0 and 0.0 must compare equal under total_cmp
            Ok(ExtValue::Finite(x + 0.0))
        }
    }

    /// Builds a value from a non-negative quantity that may carry tiny
    /// negative round-off, clamping to zero.
    pub fn from_nonneg(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            ExtValue::Infinity
        } else if x.is_nan() || x <= 0.0 {
            ExtValue::ZERO
        } else {
            ExtValue::Finite(x)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtValue::Finite(x) => Some(x),
            ExtValue::Infinity => None,
        }
    }

    /// `f64` view with infinity mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtValue::Finite(x) => x,
            ExtValue::Infinity => f64::INFINITY,
        }
    }

    /// `self <= other + slack`, with infinity absorbing the slack.
    pub fn le_with_slack(&self, other: &ExtValue, slack: f64) -> bool {
        match (self, other) {
            (_, ExtValue::Infinity) => true,
            (ExtValue::Infinity, ExtValue::Finite(_)) => false,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => *a <= *b + slack,
        }
    }

    /// Equality up to `tol` on finite values; infinities only equal each other.
    pub fn approx_eq(&self, other: &ExtValue, tol: f64) -> bool {
        match (self, other) {
            (ExtValue::Infinity, ExtValue::Infinity) => true,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl PartialEq for ExtValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtValue {}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtValue::Infinity, ExtValue::Infinity) => Ordering::Equal,
            (ExtValue::Infinity, _) => Ordering::Greater,
            (_, ExtValue::Infinity) => Ordering::Less,
            (ExtValue::Finite(a), ExtValue::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(x) => write!(f, "{x}"),
            ExtValue::Infinity => f.write_str("inf"),
        }
    }
}

impl From<u32> for ExtValue {
    fn from(n: u32) -> Self {
        ExtValue::Finite(n as f64)
    }
}

// JSON has no infinity literal; infinity travels as the string "inf".
impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtValue::Finite(x) => serializer.serialize_f64(*x),
            ExtValue::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = ExtValue;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtValue, E> {
                ExtValue::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtValue, E> {
                Ok(ExtValue::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtValue, E> {
                ExtValue::new(v as f64).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtValue, E> {
                if v == "inf" {
                    Ok(ExtValue::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}
