use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio as Fraction;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AudioError;
use crate::farey::{edge_point, fret_spacing, orient_edge, DiskPoint, ExtendedRational, FareyError};

pub const DEFAULT_OCTAVE_SHIFT: u32 = 4;

/// A frequency ratio within the octave, exact when it came from a fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ratio {
    Exact(Fraction<u64>),
    Real(f64),
}

impl Ratio {
    pub fn value(&self) -> f64 {
        match self {
            Ratio::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Ratio::Real(x) => *x,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Ratio::Real(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Ratio::Exact(_) => s.collect_str(self),
            Ratio::Real(x) => s.serialize_f64(*x),
        }
    }
}

impl FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (p, q) = s.split_once('/').unwrap_or((s, "1"));
        let p: u64 = p.trim().parse().map_err(|_| format!("bad ratio {s:?}"))?;
        let q: u64 = q.trim().parse().map_err(|_| format!("bad ratio {s:?}"))?;
        if p == 0 || q == 0 {
            return Err(format!("ratio {s:?} must be positive"));
        }
        Ok(Ratio::Exact(Fraction::new(p, q)))
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(x) => Ok(Ratio::Real(x)),
        }
    }
}

/// Twelve ratios for the scale degrees above a root, with the root placed
/// `root` hemitones above A.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TemperingRepr")]
pub struct Tempering {
    pub name: String,
    ratios: Vec<Ratio>,
    pub root: i64,
}

/// Either a built-in name or a full table.
#[derive(Deserialize)]
#[serde(untagged)]
enum TemperingRepr {
    Named(String),
    Table(TemperingTable),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemperingTable {
    name: String,
    ratios: Vec<Ratio>,
    #[serde(default)]
    root: i64,
}

impl TryFrom<TemperingRepr> for Tempering {
    type Error = AudioError;

    fn try_from(r: TemperingRepr) -> Result<Self, AudioError> {
        match r {
            TemperingRepr::Named(name) => Tempering::by_name(&name),
            TemperingRepr::Table(t) => Tempering::custom(t.name, t.ratios, t.root),
        }
    }
}

const HEMITONE: f64 = 1.0594630943592953;

fn hemitones(x: f64) -> f64 {
    (x / 12.0).exp2()
}

impl Tempering {
    pub fn equal() -> Self {
        Self {
            name: "equal".into(),
            ratios: (0..12).map(|i| Ratio::Real(hemitones(i as f64))).collect(),
            root: 0,
        }
    }

    /// Twelve tones from stacked fifths `(3/2)^k`, `k = −5..=6`, reduced into
    /// the octave above a root `root` hemitones above A.
    pub fn pythagorean(root: i64) -> Self {
        let mut ratios = vec![Ratio::Exact(Fraction::new(1, 1)); 12];
        for k in -5i32..=6 {
            let (mut p, mut q) = if k >= 0 { (3u64.pow(k as u32), 2u64.pow(k as u32)) } else { (2u64.pow((-k) as u32), 3u64.pow((-k) as u32)) };
            while p >= 2 * q {
                q *= 2;
            }
            while p < q {
                p *= 2;
            }
            ratios[(7 * k).rem_euclid(12) as usize] = Ratio::Exact(Fraction::new(p, q));
        }
        Self {
            name: "pythagorean".into(),
            ratios,
            root,
        }
    }

    pub fn custom(name: impl Into<String>, ratios: Vec<Ratio>, root: i64) -> Result<Self, AudioError> {
        let bad = |m: String| Err(AudioError::Tempering(m));
        if ratios.len() != 12 {
            return bad(format!("need 12 ratios, got {}", ratios.len()));
        }
        if (ratios[0].value() - 1.0).abs() > 1e-12 {
            return bad(format!("first ratio must be 1, got {}", ratios[0]));
        }
        for w in ratios.windows(2) {
            if !(w[0].value() < w[1].value()) {
                return bad(format!("ratios must increase: {} then {}", w[0], w[1]));
            }
        }
        if !(ratios[11].value() < 2.0) {
            return bad(format!("ratios must stay below 2, got {}", ratios[11]));
        }
        Ok(Self {
            name: name.into(),
            ratios,
            root,
        })
    }

    pub fn by_name(name: &str) -> Result<Self, AudioError> {
        match name {
            "equal" => Ok(Self::equal()),
            "pythagorean" => Ok(Self::pythagorean(3)),
            other => Err(AudioError::Tempering(format!("unknown tempering {other:?} (expected equal or pythagorean)"))),
        }
    }

    pub fn ratios(&self) -> &[Ratio] {
        &self.ratios
    }

    pub fn is_equal(&self) -> bool {
        self.name == "equal" && self.root == 0
    }

    /// Frequency of hemitone `k` above A₀ with no range check.
    fn pitch(&self, k: i64, octave_shift: u32) -> f64 {
        let a = 440.0 / 2f64.powi(octave_shift as i32);
        if self.is_equal() {
            return 440.0 * hemitones((k - 12 * octave_shift as i64) as f64);
        }
        let above = k - self.root;
        let octave = above.div_euclid(12);
        let degree = above.rem_euclid(12) as usize;
        a * 2f64.powi(octave as i32) * HEMITONE.powi(self.root as i32) * self.ratios[degree].value()
    }
}

fn check_lambda(lambda: i64) -> Result<(), AudioError> {
    if lambda < 1 {
        return Err(AudioError::BelowRange(lambda));
    }
    Ok(())
}

pub(crate) fn lambda_i64(lambda: &BigInt) -> Result<i64, AudioError> {
    lambda
        .to_i64()
        .filter(|l| *l < 12 * 1000)
        .ok_or_else(|| AudioError::OutOfRange(lambda.to_string()))
}

/// `440·ξ^{λ−12N}` for equal tempering; other temperings scale their ratio
/// table from the equal-tempered root.
pub fn freq_of_lambda(lambda: i64, octave_shift: u32, temp: &Tempering) -> Result<f64, AudioError> {
    check_lambda(lambda)?;
    Ok(temp.pitch(lambda, octave_shift))
}

/// Frequency of fret `i` on an edge of lambda length `lambda`.
pub fn fret_frequency(lambda: i64, fret: i64, octave_shift: u32, temp: &Tempering) -> Result<f64, AudioError> {
    freq_of_lambda(lambda + fret, octave_shift, temp)
}

/// Frequency while holding at signed distance `d` from the distinguished
/// fret. Exact at every fret and exponential in between.
pub fn hold_frequency(lambda: i64, d: f64, octave_shift: u32, temp: &Tempering) -> f64 {
    let x = d / fret_spacing();
    if temp.is_equal() {
        return 440.0 * hemitones(lambda as f64 + x - 12.0 * octave_shift as f64);
    }
    let below = x.floor();
    let k = lambda + below as i64;
    let (f0, f1) = (temp.pitch(k, octave_shift), temp.pitch(k + 1, octave_shift));
    f0 * (f1 / f0).powf(x - below)
}

/// Fret positions along an edge, oriented from lower to higher generation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FretSpec {
    pub tail: ExtendedRational,
    pub head: ExtendedRational,
    /// The point equidistant from both Farey horocycles.
    pub distinguished: DiskPoint,
    pub spacing: f64,
    pub range: (i64, i64),
}

impl FretSpec {
    pub fn new(x: &ExtendedRational, y: &ExtendedRational, range: (i64, i64)) -> Result<Self, FareyError> {
        let (tail, head) = orient_edge(x, y);
        let distinguished = edge_point(&tail, &head, 0.0)?;
        Ok(Self {
            tail,
            head,
            distinguished,
            spacing: fret_spacing(),
            range,
        })
    }

    pub fn fret(&self, j: i64) -> DiskPoint {
        edge_point(&self.tail, &self.head, j as f64 * self.spacing).expect("distinct endpoints")
    }

    pub fn frets(&self) -> Vec<DiskPoint> {
        (self.range.0..=self.range.1).map(|j| self.fret(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn equal_law() {
        let eq = Tempering::equal();
        assert_eq!(freq_of_lambda(48, 4, &eq).unwrap(), 440.0);
        assert!(rel(freq_of_lambda(12, 4, &eq).unwrap(), 55.0) < 1e-12);
        assert!(rel(freq_of_lambda(1, 4, &eq).unwrap(), 29.135235094880603) < 1e-12);
        assert!(rel(freq_of_lambda(48, 3, &eq).unwrap(), 880.0) < 1e-12);
        assert!(matches!(freq_of_lambda(0, 4, &eq), Err(AudioError::BelowRange(0))));
        for l in 1..100 {
            let (a, b) = (freq_of_lambda(l, 4, &eq).unwrap(), freq_of_lambda(l + 12, 4, &eq).unwrap());
            assert!(rel(b, 2.0 * a) < 1e-9);
            assert!(freq_of_lambda(l + 1, 4, &eq).unwrap() > a);
        }
    }

    #[test]
    fn named_temperings_deserialize() {
        let t: Tempering = serde_json::from_str(r#""pythagorean""#).unwrap();
        assert_eq!(t, Tempering::pythagorean(3));
        assert!(serde_json::from_str::<Tempering>(r#""meantone""#).is_err());
    }

    #[test]
    fn pythagorean_table() {
        let t = Tempering::pythagorean(3);
        let diatonic: Vec<String> = [0, 2, 4, 5, 7, 9, 11].iter().map(|&i| t.ratios()[i].to_string()).collect();
        assert_eq!(diatonic, ["1/1", "9/8", "81/64", "4/3", "3/2", "27/16", "243/128"]);
        let c = freq_of_lambda(3, 4, &t).unwrap();
        let g = freq_of_lambda(10, 4, &t).unwrap();
        assert_eq!(g / c, 1.5);
        assert!(rel(c, freq_of_lambda(3, 4, &Tempering::equal()).unwrap()) < 1e-12);
        for l in 1..60 {
            let a = freq_of_lambda(l, 4, &t).unwrap();
            assert_eq!(freq_of_lambda(l + 12, 4, &t).unwrap(), 2.0 * a);
            assert!(freq_of_lambda(l + 1, 4, &t).unwrap() > a);
        }
    }

    #[test]
    fn custom_tables_are_validated() {
        let ok: Vec<Ratio> = Tempering::pythagorean(0).ratios().to_vec();
        assert!(Tempering::custom("p", ok.clone(), 0).is_ok());
        let mut bad = ok.clone();
        bad.swap(3, 4);
        assert!(Tempering::custom("p", bad, 0).is_err());
        assert!(Tempering::custom("p", ok[..11].to_vec(), 0).is_err());
        let mut high = ok;
        high[11] = Ratio::Real(2.0);
        assert!(Tempering::custom("p", high, 0).is_err());
        let json = r#"{"name":"just","ratios":["1","16/15","9/8","6/5","5/4","4/3","45/32","3/2","8/5","5/3","9/5","15/8"],"root":3}"#;
        let just: Tempering = serde_json::from_str(json).unwrap();
        assert_eq!(freq_of_lambda(7, 4, &just).unwrap() / freq_of_lambda(3, 4, &just).unwrap(), 1.25);
        assert!(serde_json::from_str::<Tempering>(r#"{"name":"x","ratios":[1,2]}"#).is_err());
    }

    #[test]
    fn frets_and_holds() {
        let eq = Tempering::equal();
        let sp = fret_spacing();
        assert_eq!(fret_frequency(48, 0, 4, &eq).unwrap(), 440.0);
        assert!(rel(fret_frequency(48, 12, 4, &eq).unwrap(), 880.0) < 1e-12);
        assert!((fret_frequency(48, 1, 4, &eq).unwrap() - 466.1638).abs() < 1e-4);
        assert!(fret_frequency(1, -1, 4, &eq).is_err());
        assert!((hold_frequency(48, sp / 2.0, 4, &eq) - 452.893).abs() < 1e-3);
        for t in [Tempering::equal(), Tempering::pythagorean(3)] {
            for l in 1..30 {
                assert!(rel(hold_frequency(l, 0.0, 4, &t), freq_of_lambda(l, 4, &t).unwrap()) < 1e-9);
                for i in -3i64..15 {
                    if l + i >= 1 {
                        let h = hold_frequency(l, i as f64 * sp, 4, &t);
                        assert!(rel(h, fret_frequency(l, i, 4, &t).unwrap()) < 1e-9, "{} {l} {i}", t.name);
                    }
                }
                let mut last = 0.0;
                for k in -20..40 {
                    let h = hold_frequency(l, k as f64 * sp / 7.0, 4, &t);
                    assert!(h > last);
                    last = h;
                }
            }
        }
    }

    #[test]
    fn fret_points_are_evenly_spaced() {
        let spec = FretSpec::new(&ExtendedRational::frac(1, 0), &ExtendedRational::frac(0, 1), (-2, 2)).unwrap();
        assert_eq!(spec.tail, ExtendedRational::frac(0, 1));
        let pts = spec.frets();
        assert_eq!(pts.len(), 5);
        assert!(pts[2].x.abs() < 1e-12 && pts[2].y.abs() < 1e-12);
        // along the real diameter the hyperbolic distance is 2·artanh(|x|)
        let dist = |p: &DiskPoint| 2.0 * p.x.abs().atanh() * p.x.signum();
        for (j, p) in pts.iter().enumerate() {
            assert!((dist(p) - (j as f64 - 2.0) * spec.spacing).abs() < 1e-9);
        }
    }
}
