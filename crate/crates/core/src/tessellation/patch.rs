use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{EdgeKey, TessellationError, TriangleKey};
use crate::farey::ExtendedRational;

/// The ideal quadrilateral around an edge: vertices in cyclic boundary
/// order starting at the edge's lower endpoint, so the edge is the diagonal
/// `x0–x2` and the sides are `x0x1, x1x2, x2x3, x3x0`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Quad {
    pub vertices: [ExtendedRational; 4],
    #[serde(with = "crate::json_int::array")]
    pub sides: [BigInt; 4],
}

impl Quad {
    pub fn diagonal(&self) -> EdgeKey {
        EdgeKey::new(self.vertices[0].clone(), self.vertices[2].clone()).expect("distinct")
    }

    pub fn other_diagonal(&self) -> EdgeKey {
        EdgeKey::new(self.vertices[1].clone(), self.vertices[3].clone()).expect("distinct")
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlipRecord {
    pub removed: EdgeKey,
    pub inserted: EdgeKey,
    pub quad: Quad,
    #[serde(with = "crate::json_int")]
    pub removed_lambda: BigInt,
    #[serde(with = "crate::json_int")]
    pub inserted_lambda: BigInt,
}

impl FlipRecord {
    /// `λ(e)·λ(f) = a·c + b·d`.
    pub fn satisfies_ptolemy(&self) -> bool {
        let [a, b, c, d] = &self.quad.sides;
        &self.removed_lambda * &self.inserted_lambda == a * c + b * d
    }
}

/// The Farey tessellation with a finite set of flips applied.
///
/// Only the difference from `τ*` is stored: Farey edges that were flipped
/// away, non-Farey edges that were flipped in, and the faces that are not
/// Farey triangles. A Farey triangle is a face exactly when none of its
/// sides has been removed.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(from = "PatchRepr")]
pub struct TessellationPatch {
    removed: BTreeSet<EdgeKey>,
    added: BTreeSet<EdgeKey>,
    region: BTreeSet<TriangleKey>,
    #[serde(skip)]
    region_by_edge: BTreeMap<EdgeKey, Vec<TriangleKey>>,
    history: Vec<FlipRecord>,
}

#[derive(Deserialize)]
struct PatchRepr {
    removed: BTreeSet<EdgeKey>,
    added: BTreeSet<EdgeKey>,
    region: BTreeSet<TriangleKey>,
    history: Vec<FlipRecord>,
}

impl From<PatchRepr> for TessellationPatch {
    fn from(r: PatchRepr) -> Self {
        let mut patch = Self {
            removed: r.removed,
            added: r.added,
            region: r.region,
            region_by_edge: BTreeMap::new(),
            history: r.history,
        };
        patch.reindex();
        patch
    }
}

/// Two patches are equal when they describe the same tessellation; the flip
/// history that led there is not compared.
impl PartialEq for TessellationPatch {
    fn eq(&self, other: &Self) -> bool {
        self.removed == other.removed && self.added == other.added && self.region == other.region
    }
}

impl Eq for TessellationPatch {}

impl TessellationPatch {
    /// The untuned instrument: `τ*` with an empty diff.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn removed(&self) -> &BTreeSet<EdgeKey> {
        &self.removed
    }

    pub fn added(&self) -> &BTreeSet<EdgeKey> {
        &self.added
    }

    /// Faces that are not Farey triangles.
    pub fn region(&self) -> &BTreeSet<TriangleKey> {
        &self.region
    }

    pub fn history(&self) -> &[FlipRecord] {
        &self.history
    }

    pub fn is_pristine(&self) -> bool {
        self.removed.is_empty() && self.added.is_empty()
    }

    pub fn contains_edge(&self, e: &EdgeKey) -> bool {
        if e.is_farey() {
            !self.removed.contains(e)
        } else {
            self.added.contains(e)
        }
    }

    pub fn is_face(&self, tri: &TriangleKey) -> bool {
        tri.edges().iter().all(|e| self.contains_edge(e))
    }

    fn faces_on(&self, e: &EdgeKey) -> Vec<TriangleKey> {
        let mut faces = self.region_by_edge.get(e).cloned().unwrap_or_default();
        if e.is_farey() && !self.removed.contains(e) {
            let (a, b) = e.lo().farey_apices(e.hi());
            for apex in [a, b] {
                let tri = TriangleKey::new(e.lo().clone(), e.hi().clone(), apex).expect("distinct");
                if tri.edges().iter().all(|f| !self.removed.contains(f)) {
                    faces.push(tri);
                }
            }
        }
        faces
    }

    fn two_faces(&self, e: &EdgeKey) -> Result<[TriangleKey; 2], TessellationError> {
        if !self.contains_edge(e) {
            return Err(TessellationError::MissingEdge(e.to_string()));
        }
        let faces = self.faces_on(e);
        <[TriangleKey; 2]>::try_from(faces).map_err(|faces| TessellationError::Corrupt(format!(
            "edge {e} bounds {} faces",
            faces.len()
        )))
    }

    pub fn adjacent_quad(&self, e: &EdgeKey) -> Result<Quad, TessellationError> {
        let [t1, t2] = self.two_faces(e)?;
        let z = t1.apex(e).expect("face contains edge").clone();
        let w = t2.apex(e).expect("face contains edge").clone();
        let mut cyclic = [e.lo().clone(), z, e.hi().clone(), w];
        // sorting by the total order lists the points around the circle; the
        // diagonal endpoints must then alternate with the apices
        cyclic.sort();
        let start = cyclic.iter().position(|v| v == e.lo()).expect("present");
        cyclic.rotate_left(start);
        if &cyclic[2] != e.hi() {
            return Err(TessellationError::Corrupt(format!(
                "faces on {e} lie on the same side"
            )));
        }
        let lam = |i: usize, j: usize| cyclic[i].lambda(&cyclic[j]).expect("distinct");
        let sides = [lam(0, 1), lam(1, 2), lam(2, 3), lam(3, 0)];
        Ok(Quad {
            vertices: cyclic,
            sides,
        })
    }

    /// Sorted lambda lengths of a face.
    pub fn triangle_chord(&self, tri: &TriangleKey) -> Result<[BigInt; 3], TessellationError> {
        if !self.is_face(tri) {
            return Err(TessellationError::NotAFace(format!("{:?}", tri.vertices().each_ref().map(|v| v.to_string()))));
        }
        Ok(tri.chord())
    }

    /// Replaces `e` by the other diagonal of its quadrilateral.
    pub fn flip(&mut self, e: &EdgeKey) -> Result<FlipRecord, TessellationError> {
        let quad = self.adjacent_quad(e)?;
        let [t1, t2] = self.two_faces(e)?;
        let f = quad.other_diagonal();
        let removed_lambda = e.lambda();
        let inserted_lambda = f.lambda();

        let [a, b, c, d] = &quad.sides;
        let ptolemy = a * c + b * d;
        let (quotient, remainder) = ptolemy.div_rem(&removed_lambda);
        if !remainder.is_zero() || quotient != inserted_lambda {
            return Err(TessellationError::PtolemyViolation {
                edge: e.to_string(),
                product: ptolemy.to_string(),
                lambda: removed_lambda.to_string(),
            });
        }

        for tri in [t1, t2] {
            self.remove_face(&tri);
        }
        if e.is_farey() {
            self.removed.insert(e.clone());
        } else {
            self.added.remove(e);
        }
        if f.is_farey() {
            self.removed.remove(&f);
        } else {
            self.added.insert(f.clone());
        }
        for apex in [e.lo(), e.hi()] {
            let tri = TriangleKey::new(f.lo().clone(), f.hi().clone(), apex.clone()).expect("distinct");
            self.insert_face(tri);
        }

        let record = FlipRecord {
            removed: e.clone(),
            inserted: f,
            quad,
            removed_lambda,
            inserted_lambda,
        };
        self.history.push(record.clone());
        Ok(record)
    }

    /// Non-mutating flip returning the new patch, the inserted edge and the record.
    pub fn flipped(&self, e: &EdgeKey) -> Result<(Self, EdgeKey, FlipRecord), TessellationError> {
        let mut next = self.clone();
        let record = next.flip(e)?;
        Ok((next, record.inserted.clone(), record))
    }

    /// Replays a list of flips from `τ*`.
    pub fn from_flips<'a>(edges: impl IntoIterator<Item = &'a EdgeKey>) -> Result<Self, TessellationError> {
        let mut patch = Self::new();
        for e in edges {
            patch.flip(e)?;
        }
        Ok(patch)
    }

    fn remove_face(&mut self, tri: &TriangleKey) {
        if self.region.remove(tri) {
            for e in tri.edges() {
                if let Some(list) = self.region_by_edge.get_mut(&e) {
                    list.retain(|t| t != tri);
                    if list.is_empty() {
                        self.region_by_edge.remove(&e);
                    }
                }
            }
        }
    }

    fn insert_face(&mut self, tri: TriangleKey) {
        if tri.is_farey() {
            debug_assert!(tri.edges().iter().all(|e| !self.removed.contains(e)));
            return;
        }
        for e in tri.edges() {
            self.region_by_edge.entry(e).or_default().push(tri.clone());
        }
        self.region.insert(tri);
    }

    fn reindex(&mut self) {
        self.region_by_edge.clear();
        for tri in &self.region {
            for e in tri.edges() {
                self.region_by_edge.entry(e).or_default().push(tri.clone());
            }
        }
    }
}
