use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::{ExtendedRational, FareyError};

/// A horocycle in the upper half-plane.
///
/// `size` is the Euclidean diameter for a finite center and the Euclidean
/// height of the horizontal line when the center is `∞`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Horocycle {
    center: ExtendedRational,
    size: BigRational,
}

impl Horocycle {
    pub fn new(center: ExtendedRational, size: BigRational) -> Result<Self, FareyError> {
        if !size.is_positive() {
            return Err(FareyError::NonPositiveSize);
        }
        Ok(Self { center, size })
    }

    /// The Farey decoration: diameter `1/q²` at `p/q`, height `1` at `∞`.
    pub fn farey(center: &ExtendedRational) -> Self {
        let size = if center.is_infinite() {
            BigRational::one()
        } else {
            let q = center.denom();
            BigRational::new(BigInt::one(), q * q)
        };
        Self {
            center: center.clone(),
            size,
        }
    }

    pub fn center(&self) -> &ExtendedRational {
        &self.center
    }

    pub fn size(&self) -> &BigRational {
        &self.size
    }
}

fn finite_value(x: &ExtendedRational) -> BigRational {
    BigRational::new(x.numer().clone(), x.denom().clone())
}

/// Squared lambda length of two horocycles, exact.
///
/// Finite centers: `(x − x̄)² / (δ δ̄)`. One center at `∞` with height `H`:
/// `H / δ`.
pub fn lambda_squared(h1: &Horocycle, h2: &Horocycle) -> Result<BigRational, FareyError> {
    if h1.center == h2.center {
        return Err(FareyError::Coincident(h1.center.to_string()));
    }
    Ok(match (h1.center.is_infinite(), h2.center.is_infinite()) {
        (true, false) => &h1.size / &h2.size,
        (false, true) => &h2.size / &h1.size,
        _ => {
            let diff = finite_value(&h1.center) - finite_value(&h2.center);
            &diff * &diff / (&h1.size * &h2.size)
        }
    })
}

/// Lambda length as a float; decisions should use [`lambda_squared`].
pub fn lambda_general(h1: &Horocycle, h2: &Horocycle) -> Result<f64, FareyError> {
    let sq = lambda_squared(h1, h2)?;
    let value = sq.to_f64().unwrap_or(f64::INFINITY);
    Ok(value.sqrt())
}

/// Exact integer square root of a rational square, when it is one.
pub fn exact_integer_root(sq: &BigRational) -> Option<BigInt> {
    if !sq.denom().is_one() || sq.numer().is_negative() {
        return None;
    }
    let n = sq.numer();
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}
