use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{cycles, CosetTable, SurfaceError, SurfaceType};

/// An ideal triangulation of a punctured surface with an integer lambda
/// length on every edge.
///
/// Oriented edges ("darts") are numbered by the cosets of the table they came
/// from and keep their numbers through flips; `reverse` pairs each dart with
/// its opposite and `next` steps around the triangle on its left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientTriangulation {
    reverse: Vec<usize>,
    next: Vec<usize>,
    edge_of: Vec<usize>,
    edge_darts: Vec<[usize; 2]>,
    lambdas: Vec<BigInt>,
    surface: SurfaceType,
    history: Vec<usize>,
}

/// A point where a cusp's horocycle meets an edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspCrossing {
    pub edge: usize,
    #[serde(with = "crate::json_int")]
    pub lambda: BigInt,
    pub position: f64,
}

impl QuotientTriangulation {
    /// The image of `τ*`: every lambda length is 1.
    pub fn new(table: &CosetTable) -> Self {
        let n = table.index();
        let reverse = table.s().to_vec();
        let next = (0..n).map(|c| table.sigma(c)).collect();
        let mut edge_of = vec![0; n];
        let mut edge_darts = Vec::new();
        for c in 0..n {
            if c < reverse[c] {
                edge_of[c] = edge_darts.len();
                edge_of[reverse[c]] = edge_darts.len();
                edge_darts.push([c, reverse[c]]);
            }
        }
        let lambdas = vec![BigInt::one(); edge_darts.len()];
        Self {
            reverse,
            next,
            edge_of,
            edge_darts,
            lambdas,
            surface: table.classify().expect("validated table"),
            history: Vec::new(),
        }
    }

    pub fn surface_type(&self) -> SurfaceType {
        self.surface
    }

    pub fn dart_count(&self) -> usize {
        self.reverse.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_darts.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.dart_count() / 3
    }

    pub fn lambda(&self, edge: usize) -> Result<&BigInt, SurfaceError> {
        self.lambdas.get(edge).ok_or(SurfaceError::NoSuchEdge(edge))
    }

    pub fn lambdas(&self) -> &[BigInt] {
        &self.lambdas
    }

    pub fn reverse(&self, dart: usize) -> usize {
        self.reverse[dart]
    }

    pub fn next(&self, dart: usize) -> usize {
        self.next[dart]
    }

    pub fn edge_of(&self, dart: usize) -> usize {
        self.edge_of[dart]
    }

    pub fn darts(&self, edge: usize) -> Result<[usize; 2], SurfaceError> {
        self.edge_darts.get(edge).copied().ok_or(SurfaceError::NoSuchEdge(edge))
    }

    pub fn dart_lambda(&self, dart: usize) -> &BigInt {
        &self.lambdas[self.edge_of[dart]]
    }

    /// Edge ids flipped so far, in order.
    pub fn history(&self) -> &[usize] {
        &self.history
    }

    /// Triangles as dart cycles, each starting at its smallest dart, ordered
    /// by that dart.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        cycles(&self.next)
            .into_iter()
            .map(|c| <[usize; 3]>::try_from(c).expect("triangles have three sides"))
            .collect()
    }

    pub fn triangle_edges(&self, tri: usize) -> Result<[usize; 3], SurfaceError> {
        let t = self.triangles().get(tri).copied().ok_or(SurfaceError::NoSuchTriangle(tri))?;
        Ok(t.map(|d| self.edge_of[d]))
    }

    /// Sorted lambda lengths of a triangle.
    pub fn triangle_chord(&self, tri: usize) -> Result<[BigInt; 3], SurfaceError> {
        let mut chord = self.triangle_edges(tri)?.map(|e| self.lambdas[e].clone());
        chord.sort();
        Ok(chord)
    }

    /// The triangle containing `dart` and its position there.
    pub fn slot(&self, dart: usize) -> (usize, usize) {
        self.triangles()
            .iter()
            .enumerate()
            .find_map(|(i, t)| t.iter().position(|&d| d == dart).map(|k| (i, k)))
            .expect("every dart lies in a triangle")
    }

    /// Darts grouped by the cusp they point into, in the order met when
    /// walking around the cusp.
    pub fn cusps(&self) -> Vec<Vec<usize>> {
        let around: Vec<usize> = (0..self.dart_count()).map(|c| self.reverse[self.next[c]]).collect();
        cycles(&around)
    }

    pub fn is_self_folded(&self, edge: usize) -> Result<bool, SurfaceError> {
        let [i, j] = self.darts(edge)?;
        Ok(self.next[i] == j || self.next[self.next[i]] == j)
    }

    /// Flips every lift of `edge` at once; returns the new lambda length.
    pub fn flip(&mut self, edge: usize) -> Result<BigInt, SurfaceError> {
        if self.is_self_folded(edge)? {
            return Err(SurfaceError::SelfFolded(edge));
        }
        let [i, j] = self.edge_darts[edge];
        let (ni, nni) = (self.next[i], self.next[self.next[i]]);
        let (nj, nnj) = (self.next[j], self.next[self.next[j]]);
        let lam = |d: usize| &self.lambdas[self.edge_of[d]];
        // sides of the quadrilateral in cyclic order: nj, nnj, ni, nni
        let product = lam(ni) * lam(nj) + lam(nni) * lam(nnj);
        let (quotient, rem) = product.div_rem(&self.lambdas[edge]);
        if !rem.is_zero() {
            return Err(SurfaceError::Inexact {
                edge,
                product: product.to_string(),
                lambda: self.lambdas[edge].to_string(),
            });
        }
        // i now runs from the apex of its old triangle to the apex of j's
        self.next[i] = nnj;
        self.next[nnj] = ni;
        self.next[ni] = i;
        self.next[j] = nni;
        self.next[nni] = nj;
        self.next[nj] = j;
        self.lambdas[edge] = quotient.clone();
        self.history.push(edge);
        Ok(quotient)
    }

    pub fn flipped(&self, edge: usize) -> Result<Self, SurfaceError> {
        let mut q = self.clone();
        q.flip(edge)?;
        Ok(q)
    }

    /// Runs `edges` in order `repeats` times and reports the new lambda after
    /// each flip.
    pub fn flip_script(&self, edges: &[usize], repeats: usize) -> Result<(Self, Vec<BigInt>), SurfaceError> {
        let mut q = self.clone();
        let mut trace = Vec::with_capacity(edges.len() * repeats);
        for (step, &e) in edges.iter().cycle().take(edges.len() * repeats).enumerate() {
            let lambda = q.flip(e).map_err(|source| SurfaceError::Script {
                step,
                source: Box::new(source),
            })?;
            trace.push(lambda);
        }
        Ok((q, trace))
    }

    /// Crossings of the Farey horocycle at a cusp with the edges of the
    /// triangulation, by arc length in `[0, window]`, starting at the cusp's
    /// smallest incoming dart.
    ///
    /// Consecutive incoming edges are `λ_opp / (λ₁ λ₂)` apart, where `λ₁, λ₂`
    /// are the two edges at the cusp and `λ_opp` the third side of the
    /// triangle between them; that third side reaches the horocycle only
    /// when this gap is at least 2.
    pub fn cusp_crossings(&self, cusp: usize, window: f64) -> Result<Vec<CuspCrossing>, SurfaceError> {
        if !(window > 0.0) {
            return Err(SurfaceError::BadWindow(window));
        }
        let cusps = self.cusps();
        let start = *cusps
            .get(cusp)
            .ok_or(SurfaceError::NoSuchCusp(cusp))?
            .iter()
            .min()
            .expect("cusps are non-empty");
        let two = BigRational::from_integer(2.into());
        let mut out = Vec::new();
        let mut pos = BigRational::zero();
        let mut dart = start;
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        while f(&pos) <= window {
            out.push(CuspCrossing {
                edge: self.edge_of[dart],
                lambda: self.dart_lambda(dart).clone(),
                position: f(&pos),
            });
            let back = self.reverse[dart];
            let opposite = self.next[back];
            let following = self.next[opposite];
            let gap = BigRational::new(
                self.dart_lambda(opposite).clone(),
                self.dart_lambda(dart) * self.dart_lambda(following),
            );
            if gap >= two {
                let mid = f(&(&pos + &gap / &two));
                let half = f(&gap) / 2.0;
                let offset = (half * half - 1.0).max(0.0).sqrt();
                let hits: &[f64] = if gap == two { &[mid] } else { &[mid - offset, mid + offset] };
                for &x in hits {
                    if (0.0..=window).contains(&x) {
                        out.push(CuspCrossing {
                            edge: self.edge_of[opposite],
                            lambda: self.dart_lambda(opposite).clone(),
                            position: x,
                        });
                    }
                }
            }
            pos += gap;
            dart = following;
        }
        Ok(out)
    }

    /// Structural self-check: triangle cycles, edge pairing and the counts
    /// fixed by the surface type.
    pub fn check(&self) -> Result<(), String> {
        let n = self.dart_count();
        for d in 0..n {
            if self.next[self.next[self.next[d]]] != d || self.next[d] == d {
                return Err(format!("dart {d} is not on a triangle"));
            }
            if self.reverse[self.reverse[d]] != d || self.reverse[d] == d {
                return Err(format!("dart {d} has no partner"));
            }
        }
        let s = self.surface;
        if self.edge_count() != s.edges() || self.triangle_count() != s.triangles() {
            return Err(format!(
                "{} edges and {} triangles do not fit genus {} with {} punctures",
                self.edge_count(),
                self.triangle_count(),
                s.genus,
                s.punctures
            ));
        }
        if self.cusps().len() != s.punctures {
            return Err(format!("{} cusps, expected {}", self.cusps().len(), s.punctures));
        }
        if self.lambdas.iter().any(|l| l < &BigInt::one()) {
            return Err("lambda length below 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::builtin_group;
    use super::*;
    use crate::chord::{markoff_tree, MarkoffTriple};
    use std::collections::BTreeSet;

    fn torus() -> QuotientTriangulation {
        QuotientTriangulation::new(&builtin_group("commutator").unwrap())
    }

    fn big(v: [i64; 3]) -> [BigInt; 3] {
        v.map(BigInt::from)
    }

    #[test]
    fn counts() {
        for (name, e, t, cusps) in [("gamma2", 3, 2, 3), ("commutator", 3, 2, 1), ("gamma3", 6, 4, 4)] {
            let q = QuotientTriangulation::new(&builtin_group(name).unwrap());
            assert_eq!((q.edge_count(), q.triangle_count(), q.cusps().len()), (e, t, cusps), "{name}");
            q.check().unwrap();
        }
        let q = torus();
        assert_eq!(q.triangle_chord(0).unwrap(), big([1, 1, 1]));
        assert_eq!(q.triangle_chord(1).unwrap(), big([1, 1, 1]));
    }

    #[test]
    fn cusps_match_t_cycles() {
        for name in super::super::BUILTIN_GROUPS {
            let table = builtin_group(name).unwrap();
            let q = QuotientTriangulation::new(&table);
            let mut from_t: Vec<Vec<usize>> = cycles(table.t()).into_iter().map(|mut c| { c.sort(); c }).collect();
            let mut from_q: Vec<Vec<usize>> = q.cusps().into_iter().map(|mut c| { c.sort(); c }).collect();
            from_t.sort();
            from_q.sort();
            assert_eq!(from_t, from_q, "{name}");
        }
    }

    #[test]
    fn torus_flips_follow_markoff() {
        let mut q = torus();
        assert_eq!(q.flip(0).unwrap(), BigInt::from(2));
        let mut l: Vec<_> = q.lambdas().to_vec();
        l.sort();
        assert_eq!(l, big([1, 1, 2]));
        let one = (0..3).find(|&e| q.lambdas()[e] == BigInt::from(1)).unwrap();
        assert_eq!(q.flip(one).unwrap(), BigInt::from(5));
        q.check().unwrap();
    }

    #[test]
    fn flip_is_an_involution() {
        let q = torus();
        for e in 0..3 {
            // two flips turn the diagonal half way round, so its darts trade places
            let back = q.flipped(e).unwrap().flipped(e).unwrap();
            assert_eq!(back.lambdas(), q.lambdas());
            let [i, j] = q.darts(e).unwrap();
            let swap = |d: usize| if d == i { j } else if d == j { i } else { d };
            let mut relabeled: Vec<_> = back
                .triangles()
                .into_iter()
                .map(|t| {
                    let mut t = t.map(swap);
                    let k = (0..3).min_by_key(|&k| t[k]).unwrap();
                    t.rotate_left(k);
                    t
                })
                .collect();
            relabeled.sort();
            assert_eq!(relabeled, q.triangles());
            let (four, _) = q.flip_script(&[e], 4).unwrap();
            assert_eq!(four.triangles(), q.triangles());
        }
    }

    #[test]
    fn scripts() {
        let q = torus();
        let (_, trace) = q.flip_script(&[0], 3).unwrap();
        assert_eq!(trace, [2, 1, 2].map(BigInt::from));
        let (end, trace) = q.flip_script(&[0, 1], 2).unwrap();
        assert_eq!(trace.len(), 4);
        let l = end.lambdas();
        assert!(MarkoffTriple::new(l[0].clone(), l[1].clone(), l[2].clone()).is_ok());
        let (same, empty) = q.flip_script(&[], 5).unwrap();
        assert!(empty.is_empty());
        assert_eq!(same, q);
        let err = q.flip_script(&[0, 7], 1).unwrap_err();
        assert!(matches!(err, SurfaceError::Script { step: 1, .. }));
    }

    #[test]
    fn reachable_triples_are_the_markoff_tree() {
        let mut level = vec![torus()];
        let mut reached = BTreeSet::from([MarkoffTriple::root()]);
        for _ in 0..6 {
            let mut next = Vec::new();
            for q in &level {
                for e in 0..3 {
                    let child = q.flipped(e).unwrap();
                    let l = child.lambdas();
                    let m = MarkoffTriple::new(l[0].clone(), l[1].clone(), l[2].clone()).unwrap();
                    reached.insert(m.sorted());
                    next.push(child);
                }
            }
            level = next;
        }
        assert_eq!(reached, markoff_tree(6));
    }

    #[test]
    fn self_folded_edges_are_rejected() {
        // look for a self-folded edge after a few flips on the 3- and 4-punctured spheres
        let mut found = false;
        for name in ["gamma2", "gamma3"] {
            let q0 = QuotientTriangulation::new(&builtin_group(name).unwrap());
            let mut stack = vec![q0];
            for _ in 0..3 {
                let mut next = Vec::new();
                for q in &stack {
                    for e in 0..q.edge_count() {
                        if q.is_self_folded(e).unwrap() {
                            found = true;
                            assert!(matches!(q.flipped(e), Err(SurfaceError::SelfFolded(_))));
                        } else {
                            let c = q.flipped(e).unwrap();
                            c.check().unwrap();
                            next.push(c);
                        }
                    }
                }
                stack = next;
            }
        }
        assert!(found);
    }

    #[test]
    fn untuned_cusp_arpeggio_is_unit_spaced() {
        for name in super::super::BUILTIN_GROUPS {
            let q = QuotientTriangulation::new(&builtin_group(name).unwrap());
            for c in 0..q.cusps().len() {
                let xs = q.cusp_crossings(c, 5.0).unwrap();
                let pos: Vec<f64> = xs.iter().map(|x| x.position).collect();
                assert_eq!(pos, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
            }
        }
    }
}
