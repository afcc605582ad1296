use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{ChordCertificate, ChordTriple};
use crate::farey::ExtendedRational;

/// Exhaustive search for a realization with one vertex at `0/1` and the other
/// two of denominator at most `denom_bound`.
///
/// Every triangle can be moved so that one vertex is `0/1` without changing
/// its lambda lengths, and reflecting through `0` fixes the sign of the
/// second vertex. Then `x₂ = λ₃/q₂`, `x₃ = ±λ₂/q₃`, and the search is over
/// denominators only. A `None` is evidence, not proof.
pub fn brute_force_realize(t: &ChordTriple, denom_bound: u64) -> Option<ChordCertificate> {
    let [l1, l2, l3] = t.entries().each_ref().map(|x| x.to_i128());
    let (l1, l2, l3) = (l1?, l2?, l3?);
    let bound = i128::from(denom_bound);
    let reduced = |num: i128, den: i128| num.gcd(&den) == 1 && (den != 0 || num == 1);
    for q2 in 0..=bound {
        if !reduced(l3, q2) {
            continue;
        }
        for q3 in 0..=bound {
            if !reduced(l2, q3) {
                continue;
            }
            let signs: &[i128] = if q3 == 0 { &[1] } else { &[1, -1] };
            for &sign in signs {
                // x₂ = l3/q2, x₃ = sign·l2/q3
                if (l3 * q3 - sign * l2 * q2).abs() != l1 {
                    continue;
                }
                let x2 = ExtendedRational::new(BigInt::from(l3), BigInt::from(q2)).ok()?;
                let x3 = ExtendedRational::new(BigInt::from(sign * l2), BigInt::from(q3)).ok()?;
                let cert = ChordCertificate {
                    vertices: [ExtendedRational::zero(), x2, x3],
                    lambdas: t.entries().clone(),
                    params: None,
                };
                if cert.verify() {
                    return Some(cert);
                }
            }
        }
    }
    None
}
