use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FareyError;

/// A point of `Q ∪ {∞}` stored as a reduced fraction `p/q`.
///
/// The denominator is never negative, the sign lives on the numerator and
/// infinity is the single value `1/0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtendedRational {
    p: BigInt,
    q: BigInt,
}

impl ExtendedRational {
    /// Reduces `p/q` to canonical form. `(0, 0)` has no meaning and is rejected.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, FareyError> {
        let (mut p, mut q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(FareyError::ZeroOverZero);
        }
        if q.is_zero() {
            return Ok(Self::infinity());
        }
        let g = p.gcd(&q);
        p /= &g;
        q /= &g;
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Ok(Self { p, q })
    }

    pub fn infinity() -> Self {
        Self {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self {
            p: n.into(),
            q: BigInt::one(),
        }
    }

    /// Small-integer constructor for tests and literals. Panics on `0/0`.
    pub fn frac(p: i64, q: i64) -> Self {
        Self::new(p, q).expect("0/0 is not an extended rational")
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q.is_zero()
    }

    /// Signed determinant `p·s − q·r` against `other = r/s`.
    pub fn det(&self, other: &Self) -> BigInt {
        &self.p * &other.q - &self.q * &other.p
    }

    /// Lambda length of the Farey-decoration horocycles centered here and at `other`.
    pub fn lambda(&self, other: &Self) -> Result<BigInt, FareyError> {
        if self == other {
            return Err(FareyError::Coincident(self.to_string()));
        }
        Ok(self.det(other).abs())
    }

    /// Reflection `x ↦ −x`; fixes `0` and `∞`.
    pub fn reflect(&self) -> Self {
        if self.is_infinite() {
            return self.clone();
        }
        Self {
            p: -&self.p,
            q: self.q.clone(),
        }
    }

    /// Third vertex of the Farey triangle on the edge `{self, other}` that lies
    /// one generation deeper than both endpoints.
    ///
    /// The two triangles of `τ*` on a Farey edge have apices `(p+r)/(q+s)` and
    /// `(p−r)/(q−s)`. The deeper one is returned; on the base edge `{0, ∞}`
    /// both have generation 1 and `1/1` is chosen.
    pub fn mediant(&self, other: &Self) -> Result<Self, FareyError> {
        if self.lambda(other)? != BigInt::one() {
            return Err(FareyError::NotNeighbors(self.to_string(), other.to_string()));
        }
        let (plus, minus) = self.farey_apices(other);
        let (gp, gm) = (plus.generation(), minus.generation());
        Ok(match gp.cmp(&gm) {
            Ordering::Greater => plus,
            Ordering::Less => minus,
            Ordering::Equal => plus.max(minus),
        })
    }

    /// Both apices `(p+r)/(q+s)` and `(p−r)/(q−s)` of the two `τ*` triangles on a
    /// Farey edge. Callers must ensure the endpoints are neighbors.
    pub(crate) fn farey_apices(&self, other: &Self) -> (Self, Self) {
        let plus = Self::new(&self.p + &other.p, &self.q + &other.q)
            .expect("Farey neighbors never sum to 0/0");
        let minus = Self::new(&self.p - &other.p, &self.q - &other.q)
            .expect("Farey neighbors never differ by 0/0");
        (plus, minus)
    }

    /// Depth of this vertex below the base edge `{0/1, 1/0}`: the sum of the
    /// continued-fraction partial quotients of `|p|/q`. Saturates at `u64::MAX`.
    pub fn generation(&self) -> u64 {
        if self.p.is_zero() || self.q.is_zero() {
            return 0;
        }
        let mut a = self.p.abs();
        let mut b = self.q.clone();
        let mut depth: u64 = 0;
        while !b.is_zero() {
            let (quot, rem) = a.div_rem(&b);
            depth = depth.saturating_add(quot.to_u64().unwrap_or(u64::MAX));
            a = b;
            b = rem;
        }
        depth
    }

    /// The two Farey neighbors one level up the Stern–Brocot tree, whose
    /// mediant this vertex is. `None` for the generation-0 vertices `0/1`, `1/0`.
    pub fn parents(&self) -> Option<(Self, Self)> {
        if self.p.is_zero() || self.q.is_zero() {
            return None;
        }
        // Convergents of |p|/q; the penultimate one and its complement are the parents.
        let (mut a, mut b) = (self.p.abs(), self.q.clone());
        let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
        let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
        while !b.is_zero() {
            let (quot, rem) = a.div_rem(&b);
            let h_next = &quot * &h + &h_prev;
            let k_next = &quot * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            a = b;
            b = rem;
        }
        let first = Self::new(h_prev.clone(), k_prev.clone()).ok()?;
        let second = Self::new(&h - &h_prev, &k - &k_prev).ok()?;
        if self.p.is_negative() {
            Some((first.reflect(), second.reflect()))
        } else {
            Some((first, second))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        ratio_to_f64(&self.p, &self.q)
    }
}

/// `p/q` as a float without overflowing when both parts are huge.
pub(crate) fn ratio_to_f64(p: &BigInt, q: &BigInt) -> f64 {
    match (p.to_f64(), q.to_f64()) {
        (Some(pf), Some(qf)) if pf.is_finite() && qf.is_finite() => pf / qf,
        _ => {
            let shift = p.bits().max(q.bits()).saturating_sub(1000);
            let ps = (p >> shift).to_f64().unwrap_or(0.0);
            let qs = (q >> shift).to_f64().unwrap_or(0.0);
            ps / qs
        }
    }
}

/// Total order: numeric order on `Q`, with `∞` above everything.
impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.p * &other.q).cmp(&(&other.p * &self.q)),
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for ExtendedRational {
    type Err = FareyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FareyError::Parse(s.to_string());
        let (num, den) = s.trim().split_once('/').ok_or_else(bad)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let unsigned_num = num.strip_prefix('-').unwrap_or(num);
        if !digits(unsigned_num) || !digits(den) {
            return Err(bad());
        }
        let p: BigInt = num.parse().map_err(|_| bad())?;
        let q: BigInt = den.parse().map_err(|_| bad())?;
        Self::new(p, q)
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
