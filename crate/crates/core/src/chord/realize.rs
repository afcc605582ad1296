use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{factor, verify_realization, ChordError, ChordTriple};
use crate::farey::{extended_gcd, ExtendedRational};

/// Parameters of the constructive realization: the triangle is
/// `0/1, A/r, B/s` after moving an even reduced entry (if any) to the last
/// slot, and `factor` is the part of the gcd absorbed so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationParams {
    #[serde(with = "crate::json_int")]
    pub r: BigInt,
    #[serde(with = "crate::json_int")]
    pub s: BigInt,
    #[serde(with = "crate::json_int")]
    pub factor: BigInt,
    /// Positions of the input entries used as `A, B, C`.
    pub order: [usize; 3],
}

/// Three points whose pairwise lambda lengths realize a chord; `lambdas[i]`
/// belongs to the edge opposite `vertices[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordCertificate {
    pub vertices: [ExtendedRational; 3],
    #[serde(with = "crate::json_int::array")]
    pub lambdas: [BigInt; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<RealizationParams>,
}

impl ChordCertificate {
    pub fn verify(&self) -> bool {
        let distinct = self.vertices[0] != self.vertices[1]
            && self.vertices[1] != self.vertices[2]
            && self.vertices[0] != self.vertices[2];
        distinct && verify_realization(&self.vertices, &self.lambdas)
    }
}

/// Solves `a·s − b·r = c` for coprime `a, b`, with `r` reduced into `[0, |a|)`
/// (or `s = 0` when `a = 0`).
fn solve(a: &BigInt, b: &BigInt, c: &BigInt) -> (BigInt, BigInt) {
    let (g, x, y) = extended_gcd(a, b);
    debug_assert!(g.is_one());
    let (mut r, mut s) = (-(c * y), c * x);
    let m = if a.is_zero() {
        -(&s * b)
    } else {
        let k = r.div_floor(&a.abs());
        if a.is_positive() {
            -k
        } else {
            k
        }
    };
    r += &m * a;
    s += &m * b;
    (r, s)
}

/// Shifts `(r, s)` along `(F·a, F·b)` prime by prime until both are coprime to
/// every listed prime. Returns the accumulated factor, or the first prime for
/// which no shift works.
fn adjust(
    r: &mut BigInt,
    s: &mut BigInt,
    a: &BigInt,
    b: &BigInt,
    primes: &[(BigInt, u32)],
) -> Result<BigInt, BigInt> {
    let mut f = BigInt::one();
    for (p, e) in primes {
        let tries = if p == &BigInt::from(2) { 2 } else { 3 };
        let t = (0..tries)
            .map(BigInt::from)
            .find(|t| {
                let r2 = &*r + t * &f * a;
                let s2 = &*s + t * &f * b;
                !r2.is_multiple_of(p) && !s2.is_multiple_of(p)
            })
            .ok_or_else(|| p.clone())?;
        *r += &t * &f * a;
        *s += &t * &f * b;
        f *= Pow::pow(p, *e);
    }
    Ok(f)
}

/// Realizes a chord by the constructive proof of the characterization.
pub fn realize_chord(t: &ChordTriple) -> Result<ChordCertificate, ChordError> {
    t.check().map_err(ChordError::NotAChord)?;
    let n = t.gcd();
    let reduced = t.entries().clone().map(|x| x / &n);
    let primes = factor(&n);
    let mut order = [0, 1, 2];
    if n.is_even() {
        let even = reduced.iter().position(Integer::is_even).expect("parity condition");
        order.swap(even, 2);
    }
    let [a, b, c] = order.map(|i| reduced[i].clone());
    let (mut r, mut s) = solve(&a, &b, &c);
    let factor = adjust(&mut r, &mut s, &a, &b, &primes).map_err(|p| {
        ChordError::Verification(format!("no shift clears the prime {p} for {t}"))
    })?;
    let point = |num: BigInt, den: &BigInt| {
        ExtendedRational::new(num, den.clone()).map_err(|e| ChordError::Verification(e.to_string()))
    };
    // A/r is opposite the edge of length B, B/s opposite A, 0/1 opposite C.
    let by_slot = [point(&n * &b, &s)?, point(&n * &a, &r)?, ExtendedRational::zero()];
    let mut vertices = by_slot.clone();
    for (slot, &i) in order.iter().enumerate() {
        vertices[i] = by_slot[slot].clone();
    }
    let cert = ChordCertificate {
        vertices,
        lambdas: t.entries().clone(),
        params: Some(RealizationParams { r, s, factor, order }),
    };
    if !cert.verify() {
        return Err(ChordError::Verification(format!(
            "vertices {:?} do not realize {t}",
            cert.vertices.each_ref().map(|v| v.to_string())
        )));
    }
    Ok(cert)
}

/// Integers `r, s` with `a·s − b·r = 1` and both coprime to `n`.
///
/// No witness exists when `n` is even and `a, b` are both odd, since then
/// `r` and `s` have opposite parity.
pub fn bezout_witness(a: &BigInt, b: &BigInt, n: &BigInt) -> Result<(BigInt, BigInt), ChordError> {
    if n.is_zero() {
        return Err(ChordError::NoWitness("modulus must be nonzero".into()));
    }
    if !a.gcd(b).is_one() {
        return Err(ChordError::NotCoprime(a.to_string(), b.to_string()));
    }
    let (mut r, mut s) = solve(a, b, &BigInt::one());
    adjust(&mut r, &mut s, a, b, &factor(n)).map_err(|p| {
        ChordError::NoWitness(format!(
            "every solution of {a}·s − {b}·r = 1 has r or s divisible by {p}"
        ))
    })?;
    debug_assert!((a * &s - b * &r).is_one());
    Ok((r, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: u64, b: u64, c: u64) -> ChordTriple {
        ChordTriple::new(a, b, c).unwrap()
    }

    fn r(p: i64, q: i64) -> ExtendedRational {
        ExtendedRational::frac(p, q)
    }

    fn vertex_set(c: &ChordCertificate) -> Vec<ExtendedRational> {
        let mut v = c.vertices.to_vec();
        v.sort();
        v
    }

    #[test]
    fn small_examples() {
        let c = realize_chord(&t(1, 1, 1)).unwrap();
        assert_eq!(vertex_set(&c), [r(0, 1), r(1, 1), r(1, 0)]);

        let c = realize_chord(&t(1, 2, 3)).unwrap();
        assert_eq!(vertex_set(&c), [r(0, 1), r(2, 3), r(1, 0)]);
        let p = c.params.as_ref().unwrap();
        assert_eq!((p.r.clone(), p.s.clone()), (0.into(), 3.into()));

        let c = realize_chord(&t(3, 3, 3)).unwrap();
        assert_eq!(vertex_set(&c), [r(0, 1), r(3, 2), r(3, 1)]);
        let p = c.params.as_ref().unwrap();
        assert_eq!((p.r.clone(), p.s.clone()), (1.into(), 2.into()));
    }

    #[test]
    fn lambda_pairing_follows_input_order() {
        for (a, b, c) in [(2, 4, 6), (6, 2, 4), (4, 6, 2), (3, 5, 7), (12, 18, 30), (1, 13, 5)] {
            let triple = t(a, b, c);
            let cert = realize_chord(&triple).unwrap();
            let [x1, x2, x3] = &cert.vertices;
            assert_eq!(x2.lambda(x3).unwrap(), BigInt::from(a));
            assert_eq!(x1.lambda(x3).unwrap(), BigInt::from(b));
            assert_eq!(x1.lambda(x2).unwrap(), BigInt::from(c));
        }
    }

    #[test]
    fn every_small_chord_is_realized() {
        for a in 1..=30u64 {
            for b in a..=30 {
                for c in b..=30 {
                    let triple = t(a, b, c);
                    match realize_chord(&triple) {
                        Ok(cert) => assert!(cert.verify()),
                        Err(ChordError::NotAChord(_)) => assert!(!triple.is_chord()),
                        Err(e) => panic!("{triple}: {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn large_gcd_with_many_primes() {
        // n = 2·3·5·7·11·13, reduced (1, 2, 3)
        let n = 30030u64;
        let cert = realize_chord(&t(n, 2 * n, 3 * n)).unwrap();
        assert!(cert.verify());
        let f = &cert.params.as_ref().unwrap().factor;
        assert_eq!(f, &BigInt::from(n));
    }

    #[test]
    fn rejects_non_chords() {
        assert!(matches!(realize_chord(&t(10, 12, 15)), Err(ChordError::NotAChord(_))));
        assert!(matches!(realize_chord(&t(2, 2, 2)), Err(ChordError::NotAChord(_))));
    }

    #[test]
    fn bezout_examples() {
        let big = |x: i64| BigInt::from(x);
        assert_eq!(bezout_witness(&big(1), &big(0), &big(1)).unwrap(), (big(0), big(1)));

        let (r, s) = bezout_witness(&big(3), &big(2), &big(5)).unwrap();
        assert_eq!(big(3) * &s - big(2) * &r, big(1));
        assert!(r.gcd(&big(5)).is_one() && s.gcd(&big(5)).is_one());

        let (r, s) = bezout_witness(&big(4), &big(7), &big(210)).unwrap();
        assert_eq!(big(4) * &s - big(7) * &r, big(1));
        assert!(r.gcd(&big(210)).is_one() && s.gcd(&big(210)).is_one());
    }

    #[test]
    fn bezout_parity_obstruction() {
        // s − r = 1 forces one of r, s to be even
        let big = |x: i64| BigInt::from(x);
        assert!(matches!(
            bezout_witness(&big(1), &big(1), &big(6)),
            Err(ChordError::NoWitness(_))
        ));
        let (r, s) = bezout_witness(&big(1), &big(1), &big(15)).unwrap();
        assert_eq!(&s - &r, big(1));
        assert!(r.gcd(&big(15)).is_one() && s.gcd(&big(15)).is_one());
        assert!(matches!(
            bezout_witness(&big(2), &big(4), &big(3)),
            Err(ChordError::NotCoprime(..))
        ));
    }

    #[test]
    fn bezout_exhaustive_small() {
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                if num_integer::gcd(a, b) != 1 {
                    continue;
                }
                for n in 1i64..=30 {
                    let (ba, bb, bn) = (BigInt::from(a), BigInt::from(b), BigInt::from(n));
                    let feasible = n % 2 == 1 || a % 2 == 0 || b % 2 == 0;
                    match bezout_witness(&ba, &bb, &bn) {
                        Ok((r, s)) => {
                            assert!(feasible);
                            assert!((&ba * &s - &bb * &r).is_one());
                            assert!(r.gcd(&bn).is_one() && s.gcd(&bn).is_one());
                        }
                        Err(_) => assert!(!feasible, "a={a} b={b} n={n}"),
                    }
                }
            }
        }
    }
}
