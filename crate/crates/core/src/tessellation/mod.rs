//! Finite modifications of the Farey tessellation: edge keys, flips with
//! Ptolemy retuning, viewports and horocycle crossings.

mod crossings;
mod keys;
mod patch;
mod script;
mod viewport;

use thiserror::Error;

pub use crossings::{crossing_anchor, crossing_frame, Crossing};
pub use keys::{EdgeKey, TriangleKey};
pub use patch::{FlipRecord, Quad, TessellationPatch};
pub use script::{parse_tuning, FlipInstruction};
pub use viewport::{farey_skeleton, ViewportEdge};

use crate::farey::FareyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TessellationError {
    #[error("edge {0} is not in the tessellation")]
    MissingEdge(String),
    #[error("inconsistent tessellation: {0}")]
    Corrupt(String),
    #[error("{0} is not a face of the tessellation")]
    NotAFace(String),
    #[error("Ptolemy product {product} across {edge} is not divisible by {lambda}")]
    PtolemyViolation {
        edge: String,
        product: String,
        lambda: String,
    },
    #[error("crossing window must be positive, got {0}")]
    BadWindow(f64),
    #[error(transparent)]
    Farey(#[from] FareyError),
}
