//! Nonnegative reals extended with `+inf`.
//!
//! Quantities such as the A-operator seminorm or the A-numerical radius are
//! infinite for operators that do not leave the null space of `A` invariant.
//! That outcome is a value, not an error, so it gets its own variant instead
//! of riding along as an IEEE infinity. Serialized form: a JSON number when
//! finite, the string `"inf"` otherwise.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    /// Applies `f` to a finite value; infinity passes through untouched.
    pub fn map(self, f: impl FnOnce(f64) -> f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(f(v)),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }

    /// Combines two values; the result is infinite if either input is.
    pub fn zip_with(self, other: ExtReal, f: impl FnOnce(f64, f64) -> f64) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(f(a, b)),
            _ => ExtReal::Infinite,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            ExtReal::Finite(v)
        } else {
            ExtReal::Infinite
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            ExtReal::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                if v == "inf" {
                    Ok(ExtReal::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}
