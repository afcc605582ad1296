//! Exact arithmetic on the Farey tessellation: extended rationals, the
//! modular group, lambda lengths, horocycles and disk rendering data.

mod disk;
mod horocycle;
mod moebius;
mod rational;

use std::cmp::Ordering;

use thiserror::Error;

pub use disk::{
    cayley, edge_point, fret_spacing, geodesic_arc, horocycle_circle, DiskPoint, GeodesicArc,
};
pub use horocycle::{exact_integer_root, lambda_general, lambda_squared, Horocycle};
pub use moebius::{extended_gcd, MoebiusMap};
pub use rational::ExtendedRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FareyError {
    #[error("0/0 is not an extended rational")]
    ZeroOverZero,
    #[error("cannot parse {0:?} as p/q")]
    Parse(String),
    #[error("coincident points {0} have no lambda length")]
    Coincident(String),
    #[error("{0} and {1} are not Farey neighbors")]
    NotNeighbors(String, String),
    #[error("matrix does not have determinant 1")]
    NotUnimodular,
    #[error("horocycle size must be positive")]
    NonPositiveSize,
}

/// Orients an edge from lower to higher generation. Equal generations point
/// towards the larger endpoint of the total order, which also sends the base
/// edge from `0/1` to `1/0`.
pub fn orient_edge(
    x: &ExtendedRational,
    y: &ExtendedRational,
) -> (ExtendedRational, ExtendedRational) {
    let by_generation = x.generation().cmp(&y.generation());
    let ascending = match by_generation {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => x < y,
    };
    if ascending {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}
