//! Finite-index torsion-free subgroups of the modular group, given by their
//! coset tables, and the ideal triangulations of the punctured surfaces they
//! uniformize.
//!
//! Cosets are identified with oriented edges of the quotient: coset `0` is
//! the base edge `0 → ∞`, and the right action of `S` reverses an edge.

mod lift;
mod quotient;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lift::{develop, develop_by_replay, LiftedFace, LiftedPatch};
pub use quotient::{CuspCrossing, QuotientTriangulation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("invalid coset table: {0}")]
    InvalidTable(String),
    #[error("unknown group {0:?} (expected gamma2, commutator or gamma3)")]
    UnknownGroup(String),
    #[error("no edge with id {0}")]
    NoSuchEdge(usize),
    #[error("no triangle with id {0}")]
    NoSuchTriangle(usize),
    #[error("no cusp with id {0}")]
    NoSuchCusp(usize),
    #[error("edge {0} is folded inside a single triangle and cannot be flipped")]
    SelfFolded(usize),
    #[error("Ptolemy product {product} across edge {edge} is not divisible by {lambda}")]
    Inexact {
        edge: usize,
        product: String,
        lambda: String,
    },
    #[error("step {step}: {source}")]
    Script {
        step: usize,
        #[source]
        source: Box<SurfaceError>,
    },
    #[error("lifted triangulation is not integral: {0}")]
    Development(String),
    #[error("window must be positive, got {0}")]
    BadWindow(f64),
}

/// Right action of `S` and `T` on the cosets `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct CosetTable {
    s: Vec<usize>,
    t: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRepr {
    n: usize,
    #[serde(rename = "S")]
    s: Vec<usize>,
    #[serde(rename = "T")]
    t: Vec<usize>,
}

impl TryFrom<TableRepr> for CosetTable {
    type Error = SurfaceError;

    fn try_from(r: TableRepr) -> Result<Self, SurfaceError> {
        if r.s.len() != r.n || r.t.len() != r.n {
            return Err(SurfaceError::InvalidTable(format!(
                "n = {} but S has {} entries and T has {}",
                r.n,
                r.s.len(),
                r.t.len()
            )));
        }
        CosetTable::new(r.s, r.t)
    }
}

impl From<CosetTable> for TableRepr {
    fn from(t: CosetTable) -> Self {
        TableRepr {
            n: t.s.len(),
            s: t.s,
            t: t.t,
        }
    }
}

/// Genus and number of punctures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceType {
    pub genus: usize,
    pub punctures: usize,
}

impl SurfaceType {
    pub fn edges(&self) -> usize {
        6 * self.genus + 3 * self.punctures - 6
    }

    pub fn triangles(&self) -> usize {
        4 * self.genus + 2 * self.punctures - 4
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

pub(crate) fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = p[i];
        }
        out.push(cycle);
    }
    out
}

impl CosetTable {
    pub fn new(s: Vec<usize>, t: Vec<usize>) -> Result<Self, SurfaceError> {
        let bad = |m: String| Err(SurfaceError::InvalidTable(m));
        let n = s.len();
        if n == 0 || t.len() != n {
            return bad(format!("S and T must have the same positive length, got {} and {}", n, t.len()));
        }
        if !is_permutation(&s) || !is_permutation(&t) {
            return bad("S and T must be permutations of 0..n".into());
        }
        let table = Self { s, t };
        for c in 0..n {
            if table.s[table.s[c]] != c {
                return bad(format!("S² is not the identity at coset {c}"));
            }
            if table.s[c] == c {
                return bad(format!("S fixes coset {c}, so the subgroup has 2-torsion"));
            }
            let st = table.st(c);
            if st == c {
                return bad(format!("ST fixes coset {c}, so the subgroup has 3-torsion"));
            }
            if table.st(table.st(st)) != c {
                return bad(format!("(ST)³ is not the identity at coset {c}"));
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for d in [table.s[c], table.t[c]] {
                if !std::mem::replace(&mut seen[d], true) {
                    queue.push_back(d);
                }
            }
        }
        if let Some(c) = seen.iter().position(|x| !x) {
            return bad(format!("coset {c} is not reachable from coset 0"));
        }
        table.classify()?;
        Ok(table)
    }

    pub fn index(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    /// `c · ST`, which steps backwards around the triangle to the left of `c`.
    pub fn st(&self, c: usize) -> usize {
        self.t[self.s[c]]
    }

    /// `c · (ST)²`: the next oriented edge around the same triangle.
    pub fn sigma(&self, c: usize) -> usize {
        self.st(self.st(c))
    }

    pub fn classify(&self) -> Result<SurfaceType, SurfaceError> {
        let n = self.index();
        let s = cycles(&self.t).len();
        if !n.is_multiple_of(6) || 2 + n / 6 < s || !(2 + n / 6 - s).is_multiple_of(2) {
            return Err(SurfaceError::InvalidTable(format!(
                "index {n} with {s} cusps has no integral genus"
            )));
        }
        let genus = (2 + n / 6 - s) / 2;
        Ok(SurfaceType { genus, punctures: s })
    }
}

pub const BUILTIN_GROUPS: [&str; 3] = ["gamma2", "commutator", "gamma3"];

/// Coset tables of the principal congruence subgroups of level 2 and 3 and
/// of the commutator subgroup. Cosets are numbered breadth first from the
/// identity, trying `S` before `T`.
pub fn builtin_group(name: &str) -> Result<CosetTable, SurfaceError> {
    let (s, t): (&[usize], &[usize]) = match name {
        "gamma2" => (&[1, 0, 4, 5, 2, 3], &[2, 3, 0, 1, 5, 4]),
        "commutator" => (&[3, 4, 5, 0, 1, 2], &[1, 2, 3, 4, 5, 0]),
        "gamma3" => (
            &[1, 0, 4, 6, 2, 9, 3, 8, 7, 5, 11, 10],
            &[2, 3, 5, 7, 8, 0, 9, 1, 10, 11, 4, 6],
        ),
        other => return Err(SurfaceError::UnknownGroup(other.to_string())),
    };
    CosetTable::new(s.to_vec(), t.to_vec())
}
