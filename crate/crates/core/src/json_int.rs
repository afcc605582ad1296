//! Serde adapters writing `BigInt` as a plain JSON integer when it fits in
//! 64 bits and as a decimal string otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    if let Some(v) = x.to_i64() {
        s.serialize_i64(v)
    } else if let Some(v) = x.to_u64() {
        s.serialize_u64(v)
    } else {
        s.serialize_str(&x.to_string())
    }
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.parse().map_err(|_| E::custom(format!("invalid integer {v:?}")))
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    d.deserialize_any(IntVisitor)
}

/// Wrapper used to route a single value through the adapters above.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize(d).map(Int)
    }
}

/// Fixed-length arrays of `BigInt`.
pub mod array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(xs: &[BigInt; N], s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(N)?;
        for x in xs {
            t.serialize_element(&Int(x.clone()))?;
        }
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[BigInt; N], D::Error> {
        let v = Vec::<Int>::deserialize(d)?;
        let len = v.len();
        <[Int; N]>::try_from(v)
            .map(|a| a.map(|i| i.0))
            .map_err(|_| de::Error::invalid_length(len, &format!("{N} integers").as_str()))
    }
}
