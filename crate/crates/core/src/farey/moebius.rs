use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ExtendedRational, FareyError};

/// An element of `PSL₂(Z)` acting by `z ↦ (az + b)/(cz + d)`.
///
/// The sign is fixed so that `c > 0`, or `c = 0` and `d > 0`; two maps are
/// equal exactly when they act identically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MoebiusMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MoebiusMap {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, FareyError> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if &a * &d - &b * &c != BigInt::one() {
            return Err(FareyError::NotUnimodular);
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let flip = c.is_negative() || (c.is_zero() && d.is_negative());
        if flip {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::canonical(1.into(), 0.into(), 0.into(), 1.into())
    }

    /// `z ↦ −1/z`
    pub fn s() -> Self {
        Self::canonical(0.into(), (-1).into(), 1.into(), 0.into())
    }

    /// `z ↦ z + 1`
    pub fn t() -> Self {
        Self::canonical(1.into(), 1.into(), 0.into(), 1.into())
    }

    /// `z ↦ z/(z + 1)`
    pub fn u() -> Self {
        Self::canonical(1.into(), 0.into(), 1.into(), 1.into())
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(
            self.d.clone(),
            -&self.b,
            -&self.c,
            self.a.clone(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| &acc * self)
    }

    pub fn apply(&self, x: &ExtendedRational) -> ExtendedRational {
        let (p, q) = (x.numer(), x.denom());
        ExtendedRational::new(&self.a * p + &self.b * q, &self.c * p + &self.d * q)
            .expect("a unimodular map never produces 0/0")
    }

    /// Image of the oriented base edge `0/1 → 1/0`, as `(tail, head)`.
    pub fn base_edge_image(&self) -> (ExtendedRational, ExtendedRational) {
        (
            ExtendedRational::new(self.b.clone(), self.d.clone()).expect("unimodular"),
            ExtendedRational::new(self.a.clone(), self.c.clone()).expect("unimodular"),
        )
    }

    /// A map sending `x` to `∞` and its Farey neighbor `anchor` to `0/1`.
    pub fn normalizing(x: &ExtendedRational, anchor: &ExtendedRational) -> Result<Self, FareyError> {
        if x.lambda(anchor)? != BigInt::one() {
            return Err(FareyError::NotNeighbors(x.to_string(), anchor.to_string()));
        }
        // Rows chosen so that row2·x = 0 and row1·anchor = 0.
        let (p, q) = (x.numer().clone(), x.denom().clone());
        let (r, s) = (anchor.numer().clone(), anchor.denom().clone());
        let a = s.clone();
        let b = -r.clone();
        let c = q.clone();
        let d = -p.clone();
        let det = &a * &d - &b * &c;
        // det = r q − s p = ±1; fix the sign by negating the second row.
        let m = if det == BigInt::one() {
            Self::canonical(a, b, c, d)
        } else {
            Self::canonical(a, b, -c, -d)
        };
        debug_assert!(m.apply(x).is_infinite());
        debug_assert_eq!(m.apply(anchor), ExtendedRational::zero());
        Ok(m)
    }
}

impl Mul for &MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, rhs: Self) -> MoebiusMap {
        MoebiusMap::canonical(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Extended Euclid: returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}
