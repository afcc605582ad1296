use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::{EdgeKey, TessellationError, TessellationPatch};
use crate::farey::{ExtendedRational, MoebiusMap};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub edge: EdgeKey,
    #[serde(with = "crate::json_int")]
    pub lambda: BigInt,
    /// Horocyclic arc length from the canonical origin.
    pub position: f64,
}

/// The Farey neighbor that fixes the arc-length origin on the horocycle at
/// `center`: the neighbor of least generation, ties broken by the total order.
pub fn crossing_anchor(center: &ExtendedRational) -> ExtendedRational {
    match center.parents() {
        Some((a, b)) => {
            let key = |x: &ExtendedRational| (x.generation(), x.clone());
            if key(&a) <= key(&b) {
                a
            } else {
                b
            }
        }
        None if center.is_infinite() => ExtendedRational::zero(),
        None => ExtendedRational::infinity(),
    }
}

/// The map used for crossings at `center`: sends `center ↦ ∞` and the anchor
/// to `0`, carrying the Farey horocycle at `center` to the line at height 1.
pub fn crossing_frame(center: &ExtendedRational) -> MoebiusMap {
    MoebiusMap::normalizing(center, &crossing_anchor(center)).expect("anchor is a Farey neighbor")
}

fn to_ratio(x: &ExtendedRational) -> BigRational {
    BigRational::new(x.numer().clone(), x.denom().clone())
}

fn ratio_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl TessellationPatch {
    /// Points where the Farey horocycle at `center` meets edges of the
    /// tessellation, with arc positions in `[0, window]`, in order.
    ///
    /// An edge tangent to the horocycle counts once, at the point of tangency.
    pub fn horocycle_crossings(
        &self,
        center: &ExtendedRational,
        window: f64,
    ) -> Result<Vec<Crossing>, TessellationError> {
        if !(window > 0.0) {
            return Err(TessellationError::BadWindow(window));
        }
        let m = crossing_frame(center);
        let inverse = m.inverse();
        let mut out = Vec::new();
        let in_window = |x: f64| (0.0..=window).contains(&x);

        // Farey edges at the center become the verticals at the integers.
        let last = window.floor() as i64;
        for n in 0..=last {
            let far = inverse.apply(&ExtendedRational::integer(n));
            let key = EdgeKey::new(center.clone(), far).expect("distinct");
            if !self.removed().contains(&key) {
                out.push(Crossing {
                    edge: key,
                    lambda: BigInt::from(1),
                    position: n as f64,
                });
            }
        }
        // Other Farey edges map to semicircles of radius ≤ 1/2 and miss the
        // height-1 line, so only flipped-in edges remain.
        let two = BigRational::from_integer(2.into());
        for key in self.added() {
            let lambda = key.lambda();
            let (u, v) = (m.apply(key.lo()), m.apply(key.hi()));
            if u.is_infinite() || v.is_infinite() {
                let foot = if u.is_infinite() { &v } else { &u };
                let x = ratio_f64(&to_ratio(foot));
                if in_window(x) {
                    out.push(Crossing { edge: key.clone(), lambda, position: x });
                }
                continue;
            }
            let (u, v) = (to_ratio(&u), to_ratio(&v));
            let width = (&u - &v).abs();
            let mid = ratio_f64(&((&u + &v) / &two));
            match width.cmp(&two) {
                Ordering::Less => {}
                Ordering::Equal => {
                    if in_window(mid) {
                        out.push(Crossing { edge: key.clone(), lambda, position: mid });
                    }
                }
                Ordering::Greater => {
                    let half = ratio_f64(&width) / 2.0;
                    let offset = (half * half - 1.0).sqrt();
                    for x in [mid - offset, mid + offset] {
                        if in_window(x) {
                            out.push(Crossing { edge: key.clone(), lambda: lambda.clone(), position: x });
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| a.position.total_cmp(&b.position).then_with(|| a.edge.cmp(&b.edge)));
        Ok(out)
    }
}
