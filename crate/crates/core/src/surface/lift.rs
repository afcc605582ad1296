use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{CosetTable, QuotientTriangulation, SurfaceError};
use crate::farey::ExtendedRational;

type Dart = (ExtendedRational, ExtendedRational);

/// A triangle of the lift. Side `k` runs from `vertices[k]` to
/// `vertices[(k + 1) % 3]` and covers the quotient dart `labels[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftedFace {
    pub vertices: [ExtendedRational; 3],
    pub labels: [usize; 3],
    /// Distance from the anchor triangle in the dual tree.
    pub depth: usize,
}

impl LiftedFace {
    fn darts(&self) -> [Dart; 3] {
        [0, 1, 2].map(|k| (self.vertices[k].clone(), self.vertices[(k + 1) % 3].clone()))
    }

    fn rotated_to(&self, k: usize) -> Self {
        let mut f = self.clone();
        f.vertices.rotate_left(k);
        f.labels.rotate_left(k);
        f
    }
}

/// Part of the equivariant tessellation of the disk covering a quotient
/// triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftedPatch {
    pub depth: usize,
    pub faces: Vec<LiftedFace>,
}

fn vector(x: &ExtendedRational) -> [BigInt; 2] {
    [x.numer().clone(), x.denom().clone()]
}

fn det(a: &[BigInt; 2], b: &[BigInt; 2]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// The face across side 0 of `face` in the lift of `q`.
fn neighbor(q: &QuotientTriangulation, face: &LiftedFace) -> Result<LiftedFace, SurfaceError> {
    let [u, v, w] = &face.vertices;
    let j = q.reverse(face.labels[0]);
    let (nj, nnj) = (q.next(j), q.next(q.next(j)));
    let (uu, vv, ww) = (vector(u), vector(v), vector(w));
    let d = det(&uu, &vv);
    // x = (λ(x,v)·u ± λ(u,x)·v) / λ(u,v), on the far side of u–v from w
    let far = -(det(&uu, &ww) * det(&ww, &vv)).signum();
    let (a, b) = (q.dart_lambda(nnj), q.dart_lambda(nj));
    let num = [0, 1].map(|k| a * &uu[k] + &far * b * &vv[k]);
    let lam = d.abs();
    if num.iter().any(|c| !c.is_multiple_of(&lam)) || num.iter().all(Zero::is_zero) {
        return Err(SurfaceError::Development(format!(
            "apex across {u} → {v} with lambdas {b}, {a} is not a cusp"
        )));
    }
    let x = ExtendedRational::new(&num[0] / &lam, &num[1] / &lam)
        .map_err(|e| SurfaceError::Development(e.to_string()))?;
    Ok(LiftedFace {
        vertices: [v.clone(), u.clone(), x],
        labels: [j, nj, nnj],
        depth: face.depth + 1,
    })
}

/// Flips the side of `anchor` covering edge `[i, j]` of `before`, the
/// quotient just ahead of that flip, and returns a face of the result.
fn flip_anchor(before: &QuotientTriangulation, anchor: &LiftedFace, i: usize, j: usize) -> Result<LiftedFace, SurfaceError> {
    let Some(k) = anchor.labels.iter().position(|&l| l == i || l == j) else {
        return Ok(anchor.clone());
    };
    let here = anchor.rotated_to(k);
    let there = neighbor(before, &here)?;
    let (one, two) = if here.labels[0] == i { (here, there) } else { (there, here) };
    let [_, v, w] = one.vertices;
    let x = two.vertices[2].clone();
    let [li, lvw, _] = one.labels;
    let [_, _, lxv] = two.labels;
    Ok(LiftedFace {
        vertices: [w, x, v],
        labels: [li, lxv, lvw],
        depth: 0,
    })
}

/// Lifts `q` to the disk. An anchor face is carried from the base triangle
/// `{0, ∞, −1}` of the Farey tessellation through every flip in the history,
/// and the lift is then developed outwards from it for `depth` steps of the
/// dual tree.
pub fn develop(q: &QuotientTriangulation, table: &CosetTable, depth: usize) -> Result<LiftedPatch, SurfaceError> {
    if q.dart_count() != table.index() {
        return Err(SurfaceError::InvalidTable(format!(
            "quotient has {} darts but the table has index {}",
            q.dart_count(),
            table.index()
        )));
    }
    let mut replay = QuotientTriangulation::new(table);
    let mut anchor = LiftedFace {
        vertices: [ExtendedRational::zero(), ExtendedRational::infinity(), ExtendedRational::integer(-1)],
        labels: [0, table.sigma(0), table.sigma(table.sigma(0))],
        depth: 0,
    };
    for &edge in q.history() {
        let [i, j] = replay.darts(edge)?;
        anchor = flip_anchor(&replay, &anchor, i, j)?;
        replay.flip(edge)?;
    }
    let mut seen = BTreeSet::new();
    let mut faces = Vec::new();
    let mut queue = VecDeque::from([anchor]);
    while let Some(face) = queue.pop_front() {
        let mut key = face.vertices.clone();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        if face.depth < depth {
            for k in 0..3 {
                queue.push_back(neighbor(q, &face.rotated_to(k))?);
            }
        }
        faces.push(face);
    }
    Ok(LiftedPatch { depth, faces })
}

/// Replays the flip history on every lifted copy of each flipped edge inside
/// a Farey patch of the given radius. Copies whose second triangle has
/// already fallen outside the patch take their remaining triangle with them,
/// so each flip erodes the rim by about one layer.
pub fn develop_by_replay(q: &QuotientTriangulation, table: &CosetTable, radius: usize) -> Vec<LiftedFace> {
    let mut faces: BTreeMap<usize, LiftedFace> = BTreeMap::new();
    let mut dart_face: BTreeMap<Dart, usize> = BTreeMap::new();
    let mut next_id = 0;
    let mut insert = |faces: &mut BTreeMap<usize, LiftedFace>, dart_face: &mut BTreeMap<Dart, usize>, f: LiftedFace| {
        for d in f.darts() {
            dart_face.insert(d, next_id);
        }
        faces.insert(next_id, f);
        next_id += 1;
    };
    let remove = |faces: &mut BTreeMap<usize, LiftedFace>, dart_face: &mut BTreeMap<Dart, usize>, id: usize| {
        if let Some(f) = faces.remove(&id) {
            for d in f.darts() {
                dart_face.remove(&d);
            }
        }
    };
    let find = |faces: &BTreeMap<usize, LiftedFace>, dart_face: &BTreeMap<Dart, usize>, d: &Dart| {
        let id = *dart_face.get(d)?;
        let k = faces[&id].darts().iter().position(|x| x == d)?;
        Some((id, faces[&id].rotated_to(k)))
    };

    let untuned = QuotientTriangulation::new(table);
    let base = LiftedFace {
        vertices: [ExtendedRational::zero(), ExtendedRational::infinity(), ExtendedRational::integer(-1)],
        labels: [0, table.sigma(0), table.sigma(table.sigma(0))],
        depth: 0,
    };
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([base]);
    while let Some(face) = queue.pop_front() {
        let mut key = face.vertices.clone();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        if face.depth < radius {
            for k in 0..3 {
                queue.push_back(neighbor(&untuned, &face.rotated_to(k)).expect("Farey patch"));
            }
        }
        insert(&mut faces, &mut dart_face, face);
    }

    let mut replay = untuned;
    for &edge in q.history() {
        let [i, j] = replay.darts(edge).expect("edge from history");
        let copies: Vec<Dart> = faces
            .values()
            .flat_map(|f| {
                f.darts()
                    .into_iter()
                    .zip(f.labels)
                    .filter(|(_, l)| *l == i || *l == j)
                    .map(|(d, _)| d)
            })
            .collect();
        for dart in copies {
            let Some((id, one)) = find(&faces, &dart_face, &dart) else { continue };
            let twin = (dart.1.clone(), dart.0.clone());
            let Some((other_id, two)) = find(&faces, &dart_face, &twin) else {
                remove(&mut faces, &mut dart_face, id);
                continue;
            };
            if one.labels[0] != i {
                continue;
            }
            remove(&mut faces, &mut dart_face, id);
            remove(&mut faces, &mut dart_face, other_id);
            let [u, v, w] = one.vertices.clone();
            let x = two.vertices[2].clone();
            let [li, lvw, lwu] = one.labels;
            let [lj, lux, lxv] = two.labels;
            let d = one.depth.min(two.depth);
            insert(&mut faces, &mut dart_face, LiftedFace {
                vertices: [w.clone(), x.clone(), v],
                labels: [li, lxv, lvw],
                depth: d,
            });
            insert(&mut faces, &mut dart_face, LiftedFace {
                vertices: [x, w, u],
                labels: [lj, lwu, lux],
                depth: d,
            });
        }
        replay.flip(edge).expect("history replays");
    }
    faces.into_values().collect()
}

impl LiftedPatch {
    /// Checks the lift against the quotient: every lifted side has the
    /// determinant lambda of its quotient edge, each face covers a triangle
    /// of the quotient in order, and sides shared by two faces cover a dart
    /// and its reverse.
    pub fn verify(&self, q: &QuotientTriangulation) -> Result<(), String> {
        verify_faces(&self.faces, q)
    }

    /// Faces within `max_depth` of the anchor.
    pub fn core(&self, max_depth: usize) -> impl Iterator<Item = &LiftedFace> {
        self.faces.iter().filter(move |f| f.depth <= max_depth)
    }

    pub fn edges(&self) -> BTreeMap<(ExtendedRational, ExtendedRational), usize> {
        let mut out = BTreeMap::new();
        for f in &self.faces {
            for ((a, b), l) in f.darts().into_iter().zip(f.labels) {
                if a < b {
                    out.insert((a, b), l);
                } else {
                    out.insert((b, a), l);
                }
            }
        }
        out
    }
}

fn verify_faces(faces: &[LiftedFace], q: &QuotientTriangulation) -> Result<(), String> {
    let mut label_of = BTreeMap::new();
    for f in faces {
        for (k, (dart, label)) in f.darts().into_iter().zip(f.labels).enumerate() {
            let lambda = dart.0.lambda(&dart.1).map_err(|e| e.to_string())?;
            if &lambda != q.dart_lambda(label) {
                return Err(format!(
                    "side {} → {} has lambda {lambda} but covers dart {label} of lambda {}",
                    dart.0,
                    dart.1,
                    q.dart_lambda(label)
                ));
            }
            if q.next(label) != f.labels[(k + 1) % 3] {
                return Err(format!("face {:?} does not cover a quotient triangle", f.labels));
            }
            if label_of.insert(dart.clone(), label).is_some() {
                return Err(format!("side {} → {} appears twice", dart.0, dart.1));
            }
        }
    }
    for ((a, b), label) in &label_of {
        if let Some(other) = label_of.get(&(b.clone(), a.clone())) {
            if q.reverse(*label) != *other {
                return Err(format!("sides of {a}–{b} cover unpaired darts {label} and {other}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::builtin_group;
    use super::*;
    use crate::tessellation::TriangleKey;

    fn r(p: i64, q: i64) -> ExtendedRational {
        ExtendedRational::frac(p, q)
    }

    fn sorted(f: &LiftedFace) -> [ExtendedRational; 3] {
        let mut v = f.vertices.clone();
        v.sort();
        v
    }

    #[test]
    fn untuned_lift_is_farey() {
        for name in super::super::BUILTIN_GROUPS {
            let table = builtin_group(name).unwrap();
            let q = QuotientTriangulation::new(&table);
            let lift = develop(&q, &table, 3).unwrap();
            lift.verify(&q).unwrap();
            assert_eq!(lift.faces.len(), 3 * (1 << 3) - 2);
            assert!(lift.faces.iter().all(|f| {
                TriangleKey::new(f.vertices[0].clone(), f.vertices[1].clone(), f.vertices[2].clone())
                    .unwrap()
                    .is_farey()
            }));
            let base = &lift.faces[0];
            assert_eq!(base.depth, 0);
            assert_eq!(base.vertices, [r(0, 1), r(1, 0), r(-1, 1)]);
            assert_eq!(base.labels[0], 0);
        }
    }

    #[test]
    fn one_flip_on_the_torus() {
        let table = builtin_group("commutator").unwrap();
        let mut q = QuotientTriangulation::new(&table);
        q.flip(0).unwrap();
        let lift = develop(&q, &table, 2).unwrap();
        lift.verify(&q).unwrap();
        let [i, j] = q.darts(0).unwrap();
        let mut copies = 0;
        for f in &lift.faces {
            for (k, l) in f.labels.iter().enumerate() {
                if *l == i || *l == j {
                    let lam = f.vertices[k].lambda(&f.vertices[(k + 1) % 3]).unwrap();
                    assert_eq!(lam, BigInt::from(2));
                    copies += 1;
                }
            }
        }
        assert!(copies >= 4);
    }

    #[test]
    fn replay_agrees_with_development() {
        // the anchor survives the replay, and developing across any side of a
        // replayed face lands on the replayed neighbor when there is one
        for name in super::super::BUILTIN_GROUPS {
            let table = builtin_group(name).unwrap();
            let mut q = QuotientTriangulation::new(&table);
            let mut flips = 0;
            for e in [0, 1, 2, 0, 3, 1] {
                if flips < 3 && e < q.edge_count() && q.flip(e).is_ok() {
                    flips += 1;
                }
            }
            assert_eq!(flips, 3, "{name}");
            let replayed = develop_by_replay(&q, &table, flips + 3);
            verify_faces(&replayed, &q).unwrap();
            let by_key: BTreeMap<_, _> = replayed.iter().map(|f| (sorted(f), f)).collect();
            let anchor = develop(&q, &table, 0).unwrap().faces.remove(0);
            let same = |f: &LiftedFace| {
                let g = by_key.get(&sorted(f))?;
                let k = g.vertices.iter().position(|v| v == &f.vertices[0])?;
                (g.rotated_to(k).labels == f.labels).then_some(())
            };
            assert!(same(&anchor).is_some(), "{name}: anchor not among replayed faces");
            let mut shared = 0;
            for f in &replayed {
                for k in 0..3 {
                    let n = neighbor(&q, &f.rotated_to(k)).unwrap();
                    if by_key.contains_key(&sorted(&n)) {
                        assert!(same(&n).is_some(), "{name}: {:?}", n.vertices);
                        shared += 1;
                    }
                }
            }
            assert!(shared >= replayed.len(), "{name}");
        }
    }

    #[test]
    fn lifted_cusp_matches_quotient_arpeggio() {
        // vertical sides into ∞ sit at the horocycle positions of their tails
        let table = builtin_group("commutator").unwrap();
        let mut q = QuotientTriangulation::new(&table);
        for e in [0, 1, 0, 2] {
            q.flip(e).unwrap();
        }
        let lift = develop(&q, &table, 8).unwrap();
        lift.verify(&q).unwrap();
        let mut feet: Vec<(f64, usize)> = Vec::new();
        for f in &lift.faces {
            for k in 0..3 {
                if f.vertices[(k + 1) % 3].is_infinite() {
                    feet.push((f.vertices[k].to_f64(), f.labels[k]));
                }
            }
        }
        feet.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cusp = q.cusps().iter().position(|c| c.contains(&feet[0].1)).unwrap();
        let start = *q.cusps()[cusp].iter().min().unwrap();
        let origin = feet.iter().find(|f| f.1 == start).unwrap().0;
        let window = feet.last().unwrap().0 - origin;
        let arp = q.cusp_crossings(cusp, window).unwrap();
        let incident: Vec<f64> = arp.iter().map(|c| c.position).collect();
        let lifted: Vec<f64> = feet.iter().map(|f| f.0 - origin).filter(|x| *x >= 0.0).collect();
        for x in &lifted {
            assert!(incident.iter().any(|y| (x - y).abs() < 1e-9), "lifted foot {x} missing from {incident:?}");
        }
        assert!(lifted.len() >= 2);
    }

    #[test]
    fn long_histories_stay_exact() {
        let table = builtin_group("commutator").unwrap();
        let (q, _) = QuotientTriangulation::new(&table).flip_script(&[0, 1, 2], 4).unwrap();
        let lift = develop(&q, &table, 3).unwrap();
        lift.verify(&q).unwrap();
        assert_eq!(lift.faces.len(), 3 * (1 << 3) - 2);
    }
}
