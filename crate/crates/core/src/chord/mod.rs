//! Triangular chords: which triples of positive integers occur as the three
//! lambda lengths of an ideal triangle with Farey-rational vertices.

mod markoff;
mod oracle;
mod realize;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use markoff::{markoff_tree, MarkoffTriple};
pub use oracle::brute_force_realize;
pub use realize::{bezout_witness, realize_chord, ChordCertificate, RealizationParams};

use crate::farey::ExtendedRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordError {
    #[error("chord entries must be positive, got {0}")]
    NonPositive(String),
    #[error("not a chord ({0})")]
    NotAChord(Violation),
    #[error("({x}, {a}, {b}) does not satisfy x² + a² + b² = 3abx")]
    NotMarkoff { x: String, a: String, b: String },
    #[error("{0} and {1} are not coprime")]
    NotCoprime(String, String),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("realization failed verification: {0}")]
    Verification(String),
}

/// Three positive integers. Order is kept so that certificates can pair the
/// `i`-th entry with the edge opposite the `i`-th vertex; chord-ness itself
/// depends only on the multiset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ChordTriple([BigInt; 3]);

impl ChordTriple {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self, ChordError> {
        Self::try_from([a.into(), b.into(), c.into()])
    }

    pub fn entries(&self) -> &[BigInt; 3] {
        &self.0
    }

    pub fn sorted(&self) -> Self {
        let mut e = self.0.clone();
        e.sort();
        Self(e)
    }

    pub fn gcd(&self) -> BigInt {
        self.0[0].gcd(&self.0[1]).gcd(&self.0[2])
    }

    /// Checks both conditions of the chord characterization.
    pub fn check(&self) -> Result<(), Violation> {
        let e = &self.0;
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let g = e[i].gcd(&e[j]);
            if !e[k].is_multiple_of(&g) {
                return Err(Violation::Divisibility {
                    left: e[i].clone(),
                    right: e[j].clone(),
                    gcd: g,
                    other: e[k].clone(),
                });
            }
        }
        let n = self.gcd();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(
                e[i].gcd(&e[j]),
                n,
                "pairwise gcd differs from the triple gcd although every pairwise gcd divides the third entry"
            );
        }
        if n.is_even() && e.iter().all(|x| (x / &n).is_odd()) {
            return Err(Violation::Parity { n });
        }
        Ok(())
    }

    pub fn is_chord(&self) -> bool {
        self.check().is_ok()
    }
}

impl TryFrom<[BigInt; 3]> for ChordTriple {
    type Error = ChordError;

    fn try_from(e: [BigInt; 3]) -> Result<Self, ChordError> {
        if let Some(bad) = e.iter().find(|x| !x.is_positive()) {
            return Err(ChordError::NonPositive(bad.to_string()));
        }
        Ok(Self(e))
    }
}

impl From<ChordTriple> for [BigInt; 3] {
    fn from(t: ChordTriple) -> Self {
        t.0
    }
}

impl Serialize for ChordTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::json_int::array::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for ChordTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let e: [BigInt; 3] = crate::json_int::array::deserialize(d)?;
        Self::try_from(e).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ChordTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Why a triple fails to be a chord.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Divisibility {
        left: BigInt,
        right: BigInt,
        gcd: BigInt,
        other: BigInt,
    },
    Parity {
        n: BigInt,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Divisibility { left, right, gcd, other } => {
                write!(f, "Condition 1 fails: gcd({left},{right})={gcd} ∤ {other}")
            }
            Violation::Parity { n } => write!(
                f,
                "Condition 2 fails: gcd {n} is even but every entry divided by it is odd"
            ),
        }
    }
}

/// All chords `a ≤ b ≤ c ≤ max`, in lexicographic order.
pub fn sweep(max: u64) -> Vec<ChordTriple> {
    let mut out = Vec::new();
    for a in 1..=max {
        for b in a..=max {
            for c in b..=max {
                let t = ChordTriple::new(a, b, c).expect("positive");
                if t.is_chord() {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Exact check that `vertices` realize `lambdas` with `λ_i` on the edge
/// opposite `x_i`.
pub fn verify_realization(vertices: &[ExtendedRational; 3], lambdas: &[BigInt; 3]) -> bool {
    let [x1, x2, x3] = vertices;
    let pairs = [(x2, x3), (x1, x3), (x1, x2)];
    pairs
        .iter()
        .zip(lambdas)
        .all(|((u, v), l)| u.lambda(v).is_ok_and(|m| &m == l))
}

fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}
