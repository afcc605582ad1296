//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Set `HORMONICA_BLESS=1` to (re)write the
//! golden WAV file.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio as Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hormonica::audio::{
    freq_of_lambda, render_samples, universal_arpeggio, NoteEvent, PlayConfig, Ratio, Score, ScoreMeta,
    SynthConfig, Tempering,
};
use hormonica::chord::{brute_force_realize, markoff_tree, realize_chord, ChordTriple, MarkoffTriple};
use hormonica::farey::ExtendedRational;
use hormonica::session::{load_session, save_session, Request, Session, SessionConfig};
use hormonica::surface::{builtin_group, develop, QuotientTriangulation, SurfaceType};
use hormonica::tessellation::{EdgeKey, TessellationPatch, TriangleKey};

/// Relative tolerance for floating-point frequency checks.
const FREQ_TOL: f64 = 1e-9;
/// Allowed relative error of a measured waveform period.
const PERIOD_TOL: f64 = 0.005;
const ORACLE_DENOM: u64 = 100;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn r(p: i64, q: i64) -> ExtendedRational {
    ExtendedRational::frac(p, q)
}

fn big(v: [i64; 3]) -> [BigInt; 3] {
    v.map(BigInt::from)
}

fn triple(a: u64, b: u64, c: u64) -> ChordTriple {
    ChordTriple::new(a, b, c).expect("positive entries")
}

fn chord_oracle() -> Check {
    let start = Instant::now();
    let small: Vec<(u64, u64, u64)> = (1..=12u64)
        .flat_map(|a| (a..=12).flat_map(move |b| (b..=12).map(move |c| (a, b, c))))
        .collect();
    let disagreements: Vec<_> = small
        .par_iter()
        .filter(|&&(a, b, c)| {
            let t = triple(a, b, c);
            t.is_chord() != brute_force_realize(&t, ORACLE_DENOM).is_some()
        })
        .collect();
    ensure!(disagreements.is_empty(), "theorem and oracle disagree on {disagreements:?}");

    let medium: Vec<(u64, u64, u64)> = (1..=30u64)
        .flat_map(|a| (a..=30).flat_map(move |b| (b..=30).map(move |c| (a, b, c))))
        .collect();
    let realized = medium
        .par_iter()
        .map(|&(a, b, c)| {
            let t = triple(a, b, c);
            if !t.is_chord() {
                return Ok(0usize);
            }
            let cert = realize_chord(&t).map_err(|e| format!("({a},{b},{c}): {e}"))?;
            let mut got = cert.lambdas.to_vec();
            got.sort();
            if !cert.verify() || got != t.sorted().entries().to_vec() {
                return Err(format!("({a},{b},{c}): certificate {cert:?} is wrong"));
            }
            Ok(1)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum::<usize>();

    for (a, b, c) in [(10, 12, 15), (2, 6, 9), (3, 6, 10), (2, 5, 8), (160, 192, 231)] {
        ensure!(!triple(a, b, c).is_chord(), "({a},{b},{c}) accepted");
    }
    for n in 1..=100u64 {
        for (a, b, c) in [(1, n, n + 1), (1, n, 2 * n + 1), (1, n + 1, 2 * n + 1)] {
            let t = triple(a, b, c);
            ensure!(t.is_chord(), "({a},{b},{c}) rejected");
            ensure!(realize_chord(&t).map(|c| c.verify()).unwrap_or(false), "({a},{b},{c}) not realized");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!(
        "{} triples ≤ 12 agree with the Q={ORACLE_DENOM} oracle; {realized} chords ≤ 30 realized; {elapsed:.1?}",
        small.len()
    ))
}

fn markoff_dynamics() -> Check {
    let start = Instant::now();
    let table = builtin_group("commutator").map_err(|e| e.to_string())?;
    let root = QuotientTriangulation::new(&table);
    let sorted = |q: &QuotientTriangulation| {
        let l = q.lambdas();
        MarkoffTriple::new(l[0].clone(), l[1].clone(), l[2].clone()).map(|m| m.sorted())
    };
    let mut reached = BTreeSet::new();
    let mut frontier = vec![root];
    for depth in 0..=6 {
        let mut next = Vec::new();
        for q in &frontier {
            let m = sorted(q).map_err(|e| format!("depth {depth}: {e}"))?;
            ensure!(m.chord().is_chord(), "{m} is not a chord");
            reached.insert(m);
            if depth < 6 {
                for e in 0..3 {
                    next.push(q.flipped(e).map_err(|err| err.to_string())?);
                }
            }
        }
        frontier = next;
    }
    let tree = markoff_tree(6);
    ensure!(reached == tree, "reached {} triples, tree has {}", reached.len(), tree.len());
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{} triples in ≤ 6 flips equal the Markoff tree; {elapsed:.1?}", reached.len()))
}

fn ptolemy() -> Check {
    let start = Instant::now();
    let failures: Vec<String> = (0..1000u64)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = TessellationPatch::new();
            let mut inserted = Vec::new();
            for step in 0..20 {
                let keys = t.viewport_keys(4);
                let e = keys[rng.gen_range(0..keys.len())].clone();
                let rec = match t.flip(&e) {
                    Ok(rec) => rec,
                    Err(err) => return Some(format!("seed {seed} step {step}: {err}")),
                };
                let [a, b, c, d] = &rec.quad.sides;
                let sum = a * c + b * d;
                if &sum % &rec.removed_lambda != BigInt::from(0)
                    || rec.inserted_lambda != rec.inserted.lambda()
                    || &rec.removed_lambda * &rec.inserted_lambda != sum
                {
                    return Some(format!("seed {seed} step {step}: Ptolemy fails at {e}"));
                }
                inserted.push(rec.inserted);
            }
            for f in inserted.iter().rev() {
                if let Err(err) = t.flip(f) {
                    return Some(format!("seed {seed} undo: {err}"));
                }
            }
            (t != TessellationPatch::new()).then(|| format!("seed {seed}: reversal did not restore"))
        })
        .collect();
    ensure!(failures.is_empty(), "{}", failures[0]);
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("1000 sequences of 20 flips; {elapsed:.1?}"))
}

fn hyperfan() -> Check {
    let mut t = TessellationPatch::new();
    for k in 1..=10 {
        let e = EdgeKey::new(r(0, 1), r(1, k)).map_err(|e| e.to_string())?;
        t.flip(&e).map_err(|e| e.to_string())?;
    }
    for k in 1..=10i64 {
        let tri = TriangleKey::new(r(1, k + 1), r(1, k), r(1, 0)).map_err(|e| e.to_string())?;
        let chord = t.triangle_chord(&tri).map_err(|e| e.to_string())?;
        ensure!(chord == big([1, k, k + 1]), "fan triangle {k} has chord {chord:?}");
    }
    Ok("fan triangles carry {1,k,k+1} for k = 1..10".into())
}

fn surface_catalog() -> Check {
    let expected = [("gamma2", (0, 3)), ("commutator", (1, 1)), ("gamma3", (0, 4))];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, (genus, punctures)) in expected {
        let table = builtin_group(name).map_err(|e| e.to_string())?;
        let kind = table.classify().map_err(|e| e.to_string())?;
        ensure!(kind == SurfaceType { genus, punctures }, "{name} classified as {kind:?}");
        let (e, f) = (6 * genus + 3 * punctures - 6, 4 * genus + 2 * punctures - 4);
        let mut q = QuotientTriangulation::new(&table);
        let mut flips = 0;
        while flips < 50 {
            ensure!(q.edge_count() == e && q.triangle_count() == f, "{name}: counts drift");
            ensure!(q.surface_type() == kind, "{name}: type drifts");
            q.check().map_err(|err| format!("{name}: {err}"))?;
            let edge = rng.gen_range(0..e);
            if q.is_self_folded(edge).map_err(|err| err.to_string())? {
                continue;
            }
            q.flip(edge).map_err(|err| err.to_string())?;
            flips += 1;
        }
        ensure!(q.edge_count() == e && q.triangle_count() == f, "{name}: counts drift");
    }
    Ok("gamma2 (0,3), commutator (1,1), gamma3 (0,4); counts stable over 50 flips each".into())
}

fn lift_consistency() -> Check {
    let table = builtin_group("commutator").map_err(|e| e.to_string())?;
    let mut frontier = vec![QuotientTriangulation::new(&table)];
    let mut checked = 0;
    for depth in 0..=5 {
        let mut next = Vec::new();
        for q in &frontier {
            let patch = develop(q, &table, 3).map_err(|e| format!("{:?}: {e}", q.history()))?;
            ensure!(patch.faces.len() == 22, "{:?}: {} faces", q.history(), patch.faces.len());
            for face in &patch.faces {
                for k in 0..3 {
                    let (a, b) = (&face.vertices[k], &face.vertices[(k + 1) % 3]);
                    let det = a.lambda(b).map_err(|e| e.to_string())?;
                    ensure!(
                        &det == q.dart_lambda(face.labels[k]),
                        "{:?}: side {a}→{b} has lambda {det}, quotient has {}",
                        q.history(),
                        q.dart_lambda(face.labels[k])
                    );
                }
            }
            patch.verify(q).map_err(|e| format!("{:?}: {e}", q.history()))?;
            checked += 1;
            if depth < 5 {
                for e in 0..3 {
                    next.push(q.flipped(e).map_err(|err| err.to_string())?);
                }
            }
        }
        frontier = next;
    }
    Ok(format!("{checked} flip histories of length ≤ 5 develop consistently to depth 3"))
}

fn frequency_law() -> Check {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let eq = Tempering::equal();
    let a4 = freq_of_lambda(48, 4, &eq).map_err(|e| e.to_string())?;
    ensure!(rel(a4, 440.0) < FREQ_TOL, "lambda 48 sounds at {a4}");
    for l in 1..=200 {
        let (lo, hi) = (freq_of_lambda(l, 4, &eq).unwrap(), freq_of_lambda(l + 12, 4, &eq).unwrap());
        ensure!(rel(hi, 2.0 * lo) < FREQ_TOL, "octave fails at {l}");
    }
    let py = Tempering::pythagorean(3);
    let diatonic = [(0, 1, 1), (2, 9, 8), (4, 81, 64), (5, 4, 3), (7, 3, 2), (9, 27, 16), (11, 243, 128)];
    let root = freq_of_lambda(3, 4, &py).unwrap();
    for (degree, p, q) in diatonic {
        ensure!(py.ratios()[degree] == Ratio::Exact(Exact::new(p, q)), "degree {degree} is {}", py.ratios()[degree]);
        let f = freq_of_lambda(3 + degree as i64, 4, &py).unwrap();
        ensure!(rel(f / root, p as f64 / q as f64) < FREQ_TOL, "degree {degree} sounds at ratio {}", f / root);
    }
    Ok(format!("λ=48 → {a4} Hz; octaves double; 7 Pythagorean ratios exact"))
}

fn arpeggio() -> Check {
    let cfg = PlayConfig::default();
    let t = TessellationPatch::new();
    let crossings = t.horocycle_crossings(&ExtendedRational::infinity(), 5.0).map_err(|e| e.to_string())?;
    let positions: Vec<f64> = crossings.iter().map(|c| c.position).collect();
    ensure!(positions == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0], "positions {positions:?}");
    ensure!(crossings.iter().all(|c| c.lambda == BigInt::from(1)), "non-unit lambda");
    let at_zero = t.horocycle_crossings(&ExtendedRational::zero(), 5.0).map_err(|e| e.to_string())?;
    let shape = |v: &[hormonica::tessellation::Crossing]| v.iter().map(|c| (c.position, c.lambda.clone())).collect::<Vec<_>>();
    ensure!(shape(&at_zero) == shape(&crossings), "recentering to 0/1 changes the arpeggio");
    let inf = universal_arpeggio(&t, &ExtendedRational::infinity(), 5.0, 1.0, &cfg).map_err(|e| e.to_string())?;
    let zero = universal_arpeggio(&t, &ExtendedRational::zero(), 5.0, 1.0, &cfg).map_err(|e| e.to_string())?;
    ensure!(inf == zero, "scores differ after recentering");
    Ok("6 events at positions 0..5, all λ=1, same at 0/1".into())
}

fn golden_script() -> Vec<Request> {
    let e = |a: &str, b: &str| EdgeKey::parse(a, b).expect("edge");
    vec![
        Request::tap(e("0/1", "1/0")),
        Request::pedal(e("0/1", "1/0")),
        Request::tap(e("-1/1", "1/1")),
        Request::pedal(e("0/1", "1/1")),
        Request::TriangleTap { vertices: Some(TriangleKey::new(r(-1, 1), r(1, 2), r(1, 1)).unwrap()), tri_id: None },
        Request::HoldStart { edge: Some(e("-1/1", "1/2")), edge_id: None, d: 0.5 },
        Request::tap(e("1/2", "1/1")),
        Request::HoldStop { hold_id: 0 },
    ]
}

fn dominant_period(samples: &[f64]) -> f64 {
    // mean distance between upward zero crossings, with linear interpolation
    let mut ups = Vec::new();
    for (i, w) in samples.windows(2).enumerate() {
        if w[0] < 0.0 && w[1] >= 0.0 {
            ups.push(i as f64 + w[0] / (w[0] - w[1]));
        }
    }
    (ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64
}

fn wav_determinism() -> Check {
    let mut s = Session::new("golden", SessionConfig::default());
    for req in golden_script() {
        if let Some(err) = s.handle(req).iter().find(|r| r.is_error()) {
            return Err(err.to_json());
        }
    }
    let bytes = s.render_wav().map_err(|e| e.to_string())?;
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden.wav");
    if std::env::var_os("HORMONICA_BLESS").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&golden, &bytes).map_err(|e| e.to_string())?;
    }
    let expected = std::fs::read(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    ensure!(bytes == expected, "rendered {} bytes differ from golden {} bytes", bytes.len(), expected.len());

    let cfg = SynthConfig::default();
    let mut score = Score::new(ScoreMeta::default());
    score.push(NoteEvent::sine(0.0, 1.0, 440.0)).map_err(|e| e.to_string())?;
    let samples = render_samples(&score, &cfg).map_err(|e| e.to_string())?;
    let period = dominant_period(&samples[..cfg.sample_rate as usize]);
    let target = f64::from(cfg.sample_rate) / 440.0;
    let err = (period - target).abs() / target;
    ensure!(err < PERIOD_TOL, "period {period} vs {target}");
    Ok(format!("golden WAV matches ({} bytes); 440 Hz period {period:.4} samples ({:.4}% off)", bytes.len(), err * 100.0))
}

fn session_replay() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut s = Session::new("replay", SessionConfig::default());
    let mut open_holds = Vec::new();
    let mut next_hold = 0u64;
    while s.log().len() < 50 {
        let logged = s.log().len();
        let req = if logged == 35 {
            Request::Mode { equivariant: true, group: Some("commutator".into()) }
        } else if let Some(q) = s.quotient() {
            let e = rng.gen_range(0..q.edge_count());
            match rng.gen_range(0..3) {
                0 => Request::pedal_id(e),
                1 => Request::tap_id(e),
                _ => Request::TriangleTap { vertices: None, tri_id: Some(rng.gen_range(0..q.triangle_count())) },
            }
        } else {
            let t = s.patch().expect("universal");
            let keys = t.viewport_keys(3);
            let e = keys[rng.gen_range(0..keys.len())].clone();
            match rng.gen_range(0..5) {
                0 | 1 => Request::pedal(e),
                2 => Request::tap(e),
                3 if !open_holds.is_empty() => Request::HoldStop { hold_id: open_holds.pop().unwrap() },
                3 => {
                    open_holds.push(next_hold);
                    next_hold += 1;
                    Request::HoldStart { edge: Some(e), edge_id: None, d: rng.gen_range(-1.0..1.0) }
                }
                _ => {
                    let faces = t.faces_in_viewport(3);
                    Request::TriangleTap { vertices: Some(faces[rng.gen_range(0..faces.len())].clone()), tri_id: None }
                }
            }
        };
        if let Some(err) = s.handle(req).iter().find(|r| r.is_error()) {
            return Err(format!("event {logged}: {}", err.to_json()));
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("session.json");
    save_session(&s, &path).map_err(|e| e.to_string())?;
    let back = load_session(&path).map_err(|e| e.to_string())?;
    ensure!(back == s, "replayed session differs");
    ensure!(back.digest() == s.digest(), "digest differs");
    let (a, b) = (s.render_wav().map_err(|e| e.to_string())?, back.render_wav().map_err(|e| e.to_string())?);
    ensure!(a == b, "WAV differs after replay");
    Ok(format!("{}-event log replays to the same state and a bit-identical {}-byte WAV", s.log().len(), a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("chord theorem agrees with oracle", chord_oracle),
        ("Markoff dynamics", markoff_dynamics),
        ("Ptolemy integrality and involution", ptolemy),
        ("hyperfan chords", hyperfan),
        ("surface catalog", surface_catalog),
        ("lift consistency", lift_consistency),
        ("frequency law", frequency_law),
        ("arpeggio", arpeggio),
        ("WAV determinism", wav_determinism),
        ("session replay", session_replay),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
