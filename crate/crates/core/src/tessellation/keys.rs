use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::farey::{ExtendedRational, FareyError};

/// An unordered edge between two distinct extended rationals, stored with
/// endpoints in ascending total order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeKey {
    lo: ExtendedRational,
    hi: ExtendedRational,
}

impl EdgeKey {
    pub fn new(x: ExtendedRational, y: ExtendedRational) -> Result<Self, FareyError> {
        if x == y {
            return Err(FareyError::Coincident(x.to_string()));
        }
        Ok(if x < y { Self { lo: x, hi: y } } else { Self { lo: y, hi: x } })
    }

    pub fn parse(a: &str, b: &str) -> Result<Self, FareyError> {
        Self::new(a.parse()?, b.parse()?)
    }

    pub fn lo(&self) -> &ExtendedRational {
        &self.lo
    }

    pub fn hi(&self) -> &ExtendedRational {
        &self.hi
    }

    pub fn lambda(&self) -> BigInt {
        self.lo.lambda(&self.hi).expect("edge endpoints are distinct")
    }

    /// Edges of `τ*` are exactly the edges of lambda length 1.
    pub fn is_farey(&self) -> bool {
        self.lambda() == BigInt::from(1)
    }

    pub fn has_endpoint(&self, x: &ExtendedRational) -> bool {
        &self.lo == x || &self.hi == x
    }

    pub fn other(&self, x: &ExtendedRational) -> Option<&ExtendedRational> {
        if &self.lo == x {
            Some(&self.hi)
        } else if &self.hi == x {
            Some(&self.lo)
        } else {
            None
        }
    }

    /// Whether the two chords cross inside the disk: their endpoints
    /// interleave around the boundary circle.
    pub fn crosses(&self, other: &EdgeKey) -> bool {
        let inside = |x: &ExtendedRational| x > &self.lo && x < &self.hi;
        let shared = self.has_endpoint(&other.lo) || self.has_endpoint(&other.hi);
        !shared && inside(&other.lo) != inside(&other.hi)
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

impl Serialize for EdgeKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [&self.lo, &self.hi].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EdgeKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b] = <[ExtendedRational; 2]>::deserialize(deserializer)?;
        EdgeKey::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// Three pairwise distinct extended rationals, sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TriangleKey {
    vertices: [ExtendedRational; 3],
}

impl TriangleKey {
    pub fn new(a: ExtendedRational, b: ExtendedRational, c: ExtendedRational) -> Result<Self, FareyError> {
        let mut vertices = [a, b, c];
        vertices.sort();
        if vertices[0] == vertices[1] || vertices[1] == vertices[2] {
            return Err(FareyError::Coincident(vertices[1].to_string()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[ExtendedRational; 3] {
        &self.vertices
    }

    pub fn edges(&self) -> [EdgeKey; 3] {
        let [a, b, c] = &self.vertices;
        let e = |x: &ExtendedRational, y: &ExtendedRational| EdgeKey {
            lo: x.clone(),
            hi: y.clone(),
        };
        [e(a, b), e(b, c), e(a, c)]
    }

    pub fn contains_edge(&self, e: &EdgeKey) -> bool {
        self.vertices.contains(&e.lo) && self.vertices.contains(&e.hi)
    }

    /// The vertex not on `e`, when `e` is a side.
    pub fn apex(&self, e: &EdgeKey) -> Option<&ExtendedRational> {
        if !self.contains_edge(e) {
            return None;
        }
        self.vertices.iter().find(|v| !e.has_endpoint(v))
    }

    /// Sorted pairwise lambda lengths.
    pub fn chord(&self) -> [BigInt; 3] {
        let mut lambdas = self.edges().map(|e| e.lambda());
        lambdas.sort();
        lambdas
    }

    pub fn is_farey(&self) -> bool {
        self.edges().iter().all(EdgeKey::is_farey)
    }
}

impl Serialize for TriangleKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.vertices.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TriangleKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [a, b, c] = <[ExtendedRational; 3]>::deserialize(deserializer)?;
        TriangleKey::new(a, b, c).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> ExtendedRational {
        ExtendedRational::frac(p, q)
    }

    #[test]
    fn edge_key_is_canonical() {
        let a = EdgeKey::new(r(1, 0), r(0, 1)).unwrap();
        let b = EdgeKey::new(r(0, 1), r(1, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lo(), &r(0, 1));
        assert!(EdgeKey::new(r(1, 2), r(2, 4)).is_err());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"["0/1","1/0"]"#);
        let back: EdgeKey = serde_json::from_str(r#"["1/0","0/1"]"#).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn crossing_is_interleaving() {
        let base = EdgeKey::new(r(0, 1), r(1, 0)).unwrap();
        let diag = EdgeKey::new(r(-1, 1), r(1, 1)).unwrap();
        assert!(base.crosses(&diag) && diag.crosses(&base));
        let side = EdgeKey::new(r(0, 1), r(1, 1)).unwrap();
        assert!(!base.crosses(&side));
        let nested = EdgeKey::new(r(1, 3), r(1, 2)).unwrap();
        assert!(!base.crosses(&nested));
    }

    #[test]
    fn triangle_helpers() {
        let t = TriangleKey::new(r(1, 1), r(-1, 1), r(0, 1)).unwrap();
        assert_eq!(t.chord(), [1, 1, 2].map(BigInt::from));
        let e = EdgeKey::new(r(-1, 1), r(1, 1)).unwrap();
        assert_eq!(t.apex(&e), Some(&r(0, 1)));
        assert!(!t.is_farey());
        assert!(TriangleKey::new(r(0, 1), r(0, 1), r(1, 1)).is_err());
    }
}
