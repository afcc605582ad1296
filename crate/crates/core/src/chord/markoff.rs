use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{ChordError, ChordTriple};

/// A positive solution of `x² + a² + b² = 3abx`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MarkoffTriple([BigInt; 3]);

impl MarkoffTriple {
    pub fn new(x: impl Into<BigInt>, a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, ChordError> {
        Self::try_from([x.into(), a.into(), b.into()])
    }

    pub fn root() -> Self {
        Self([1, 1, 1].map(BigInt::from))
    }

    pub fn entries(&self) -> &[BigInt; 3] {
        &self.0
    }

    pub fn sorted(&self) -> Self {
        let mut e = self.0.clone();
        e.sort();
        Self(e)
    }

    /// Replaces entry `i` by `(sum of squares of the others) / entry`, the
    /// Ptolemy relation on the once-punctured torus.
    pub fn flip(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let num = &e[j] * &e[j] + &e[k] * &e[k];
        let (q, rem) = num.div_rem(&e[i]);
        assert!(rem == BigInt::from(0), "inexact Markoff flip from {self}");
        e[i] = q;
        let out = Self(e);
        debug_assert!(is_markoff(&out.0));
        out
    }

    pub fn children(&self) -> [Self; 3] {
        [0, 1, 2].map(|i| self.flip(i))
    }

    pub fn chord(&self) -> ChordTriple {
        ChordTriple::try_from(self.0.clone()).expect("positive")
    }
}

pub fn is_markoff(e: &[BigInt; 3]) -> bool {
    let [x, a, b] = e;
    x * x + a * a + b * b == BigInt::from(3) * a * b * x
}

impl TryFrom<[BigInt; 3]> for MarkoffTriple {
    type Error = ChordError;

    fn try_from(e: [BigInt; 3]) -> Result<Self, ChordError> {
        let positive = e.iter().all(|v| v > &BigInt::from(0));
        if !positive || !is_markoff(&e) {
            let [x, a, b] = e.map(|v| v.to_string());
            return Err(ChordError::NotMarkoff { x, a, b });
        }
        Ok(Self(e))
    }
}

impl Serialize for MarkoffTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::json_int::array::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for MarkoffTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let e: [BigInt; 3] = crate::json_int::array::deserialize(d)?;
        Self::try_from(e).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for MarkoffTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Sorted triples reachable from `(1, 1, 1)` in at most `depth` flips.
pub fn markoff_tree(depth: usize) -> BTreeSet<MarkoffTriple> {
    let mut seen = BTreeSet::from([MarkoffTriple::root()]);
    let mut frontier = vec![MarkoffTriple::root()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for m in &frontier {
            for child in m.children() {
                if seen.insert(child.sorted()) {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    seen
}
