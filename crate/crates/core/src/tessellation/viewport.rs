use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{EdgeKey, TessellationPatch, TriangleKey};
use crate::farey::{geodesic_arc, orient_edge, DiskPoint, ExtendedRational, GeodesicArc};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViewportEdge {
    pub key: EdgeKey,
    #[serde(with = "crate::json_int")]
    pub lambda: BigInt,
    /// `(tail, head)` from lower to higher generation.
    pub orientation: (ExtendedRational, ExtendedRational),
    pub arc: GeodesicArc,
}

type Skeleton = (BTreeSet<EdgeKey>, BTreeSet<TriangleKey>);

/// Edges and triangles of `τ*` whose vertices all have generation ≤ `max_gen`.
pub fn farey_skeleton(max_gen: u64) -> Arc<Skeleton> {
    static CACHE: OnceLock<Mutex<BTreeMap<u64, Arc<Skeleton>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&max_gen) {
        return Arc::clone(hit);
    }
    let built = Arc::new(build_skeleton(max_gen));
    cache.lock().expect("cache lock").insert(max_gen, Arc::clone(&built));
    built
}

fn build_skeleton(max_gen: u64) -> Skeleton {
    let mut edges = BTreeSet::new();
    let mut faces = BTreeSet::new();
    let zero = ExtendedRational::zero();
    let inf = ExtendedRational::infinity();
    edges.insert(EdgeKey::new(zero.clone(), inf.clone()).expect("distinct"));
    if max_gen == 0 {
        return (edges, faces);
    }
    // Each Farey triangle below the base edge is reached from its parent edge.
    let mut stack = vec![
        (zero.clone(), inf.clone(), ExtendedRational::integer(1)),
        (zero, inf, ExtendedRational::integer(-1)),
    ];
    while let Some((x, y, apex)) = stack.pop() {
        if apex.generation() > max_gen {
            continue;
        }
        edges.insert(EdgeKey::new(x.clone(), apex.clone()).expect("distinct"));
        edges.insert(EdgeKey::new(y.clone(), apex.clone()).expect("distinct"));
        faces.insert(TriangleKey::new(x.clone(), y.clone(), apex.clone()).expect("distinct"));
        for side in [x, y] {
            let child = side.mediant(&apex).expect("Farey neighbors");
            stack.push((side, apex.clone(), child));
        }
    }
    (edges, faces)
}

impl TessellationPatch {
    /// All edges whose endpoints both have generation ≤ `max_gen`, sorted.
    pub fn viewport_keys(&self, max_gen: u64) -> Vec<EdgeKey> {
        let skeleton = farey_skeleton(max_gen);
        let within = |e: &EdgeKey| e.lo().generation() <= max_gen && e.hi().generation() <= max_gen;
        let mut keys: BTreeSet<EdgeKey> = skeleton
            .0
            .iter()
            .filter(|e| !self.removed().contains(*e))
            .cloned()
            .collect();
        keys.extend(self.added().iter().filter(|e| within(e)).cloned());
        keys.into_iter().collect()
    }

    pub fn edges_in_viewport(&self, max_gen: u64) -> Vec<ViewportEdge> {
        self.viewport_keys(max_gen)
            .into_iter()
            .map(|key| {
                let orientation = orient_edge(key.lo(), key.hi());
                let arc = geodesic_arc(key.lo(), key.hi()).expect("distinct");
                ViewportEdge {
                    lambda: key.lambda(),
                    orientation,
                    arc,
                    key,
                }
            })
            .collect()
    }

    /// Faces whose vertices all have generation ≤ `max_gen`, sorted.
    pub fn faces_in_viewport(&self, max_gen: u64) -> Vec<TriangleKey> {
        let skeleton = farey_skeleton(max_gen);
        let mut faces: BTreeSet<TriangleKey> = skeleton.1.iter().filter(|t| self.is_face(t)).cloned().collect();
        faces.extend(
            self.region()
                .iter()
                .filter(|t| t.vertices().iter().all(|v| v.generation() <= max_gen))
                .cloned(),
        );
        faces.into_iter().collect()
    }

    /// The viewport drawn in the Poincaré disk as a standalone SVG document.
    /// Farey edges are grey; flipped-in edges are coloured by lambda length.
    pub fn viewport_svg(&self, max_gen: u64, size: u32) -> String {
        let half = f64::from(size) / 2.0;
        let radius = half * 0.95;
        let screen = |p: DiskPoint| (half + radius * p.x, half - radius * p.y);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        );
        out += &format!(
            "<circle cx=\"{half:.3}\" cy=\"{half:.3}\" r=\"{radius:.3}\" fill=\"none\" stroke=\"black\"/>\n"
        );
        for edge in self.edges_in_viewport(max_gen) {
            let (from, to) = edge.arc.endpoints();
            let (x1, y1) = screen(from);
            let (x2, y2) = screen(to);
            let colour = if edge.key.is_farey() {
                "#888888".to_string()
            } else {
                let hue = (edge.lambda.to_f64().unwrap_or(0.0) * 37.0) % 360.0;
                format!("hsl({hue:.0},70%,45%)")
            };
            let path = match &edge.arc {
                GeodesicArc::Diameter { .. } => format!("M {x1:.3} {y1:.3} L {x2:.3} {y2:.3}"),
                GeodesicArc::Arc { center, radius: r, .. } => {
                    let (cx, cy) = screen(*center);
                    let cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx);
                    let sweep = u8::from(cross > 0.0);
                    let r = r * radius;
                    format!("M {x1:.3} {y1:.3} A {r:.3} {r:.3} 0 0 {sweep} {x2:.3} {y2:.3}")
                }
            };
            out += &format!(
                "<path d=\"{path}\" fill=\"none\" stroke=\"{colour}\" data-edge=\"{}\" data-lambda=\"{}\"/>\n",
                edge.key, edge.lambda
            );
        }
        out += "</svg>\n";
        out
    }
}
