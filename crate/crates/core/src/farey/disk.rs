//! Euclidean rendering data for the Poincaré disk.
//!
//! Everything here is floating point and feeds drawing only; no
//! combinatorial decision reads these values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rational::ratio_to_f64;
use super::{ExtendedRational, FareyError};

const ANTIPODAL_EPS: f64 = 1e-9;

/// Hyperbolic spacing between neighbouring frets.
pub fn fret_spacing() -> f64 {
    0.5 * 0.5f64.exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    fn from_complex(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeodesicArc {
    Diameter {
        from: DiskPoint,
        to: DiskPoint,
    },
    /// Circle orthogonal to the unit circle through both endpoints.
    Arc {
        from: DiskPoint,
        to: DiskPoint,
        center: DiskPoint,
        radius: f64,
    },
}

impl GeodesicArc {
    pub fn endpoints(&self) -> (DiskPoint, DiskPoint) {
        match self {
            GeodesicArc::Diameter { from, to } | GeodesicArc::Arc { from, to, .. } => (*from, *to),
        }
    }
}

/// Boundary point of the disk under `z ↦ (z − i)/(z + i)`.
pub fn cayley(x: &ExtendedRational) -> DiskPoint {
    if x.is_infinite() {
        return DiskPoint::new(1.0, 0.0);
    }
    // For real z = p/q: ((p² − q²) − 2pq·i) / (p² + q²).
    let p = x.numer();
    let q = x.denom();
    let p2 = p * p;
    let q2 = q * q;
    let sum = &p2 + &q2;
    DiskPoint::new(
        ratio_to_f64(&(&p2 - &q2), &sum),
        ratio_to_f64(&(-(p * q) * 2), &sum),
    )
}

fn cayley_complex(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (z - i) / (z + i)
}

pub fn geodesic_arc(x: &ExtendedRational, y: &ExtendedRational) -> Result<GeodesicArc, FareyError> {
    if x == y {
        return Err(FareyError::Coincident(x.to_string()));
    }
    let from = cayley(x);
    let to = cayley(y);
    let dot = from.x * to.x + from.y * to.y;
    if 1.0 + dot < ANTIPODAL_EPS {
        return Ok(GeodesicArc::Diameter { from, to });
    }
    // Tangent lines at both endpoints meet at the center of the orthogonal circle.
    let scale = 1.0 / (1.0 + dot);
    let center = DiskPoint::new((from.x + to.x) * scale, (from.y + to.y) * scale);
    let radius = (center.norm_sqr() - 1.0).max(0.0).sqrt();
    Ok(GeodesicArc::Arc {
        from,
        to,
        center,
        radius,
    })
}

/// Disk image of the Farey horocycle at `x`: center and radius of a circle
/// internally tangent to the boundary at `cayley(x)`.
///
/// The radius has the closed form `1/(1 + p² + q²)`.
pub fn horocycle_circle(x: &ExtendedRational) -> (DiskPoint, f64) {
    let p = x.numer();
    let q = x.denom();
    let radius = ratio_to_f64(&1.into(), &(p * p + q * q + 1));
    let b = cayley(x);
    (DiskPoint::new(b.x * (1.0 - radius), b.y * (1.0 - radius)), radius)
}

/// The point on the geodesic `tail → head` at signed hyperbolic distance
/// `offset` from the point equidistant to both Farey horocycles.
pub fn edge_point(
    tail: &ExtendedRational,
    head: &ExtendedRational,
    offset: f64,
) -> Result<DiskPoint, FareyError> {
    if tail == head {
        return Err(FareyError::Coincident(tail.to_string()));
    }
    // N = [[r, p], [s, q]] sends 0 ↦ tail = p/q and ∞ ↦ head = r/s. With
    // det N = λ > 0 the Farey horocycles pull back to diameter 1/λ at 0 and
    // height λ at ∞, so the equidistant point is N(i).
    let (mut p, mut q) = (tail.numer().clone(), tail.denom().clone());
    let (r, s) = (head.numer(), head.denom());
    if r * &q - &p * s < 0.into() {
        p = -p;
        q = -q;
    }
    let f = |v: &num_bigint::BigInt| ratio_to_f64(v, &1.into());
    let w = Complex64::new(0.0, offset.exp());
    let z = (w * f(r) + f(&p)) / (w * f(s) + f(&q));
    Ok(DiskPoint::from_complex(cayley_complex(z)))
}
