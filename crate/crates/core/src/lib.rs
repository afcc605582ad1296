//! The plastic hormonica: an instrument played on the Farey tessellation.
//!
//! Edges carry integer lambda lengths, flips retune the instrument through
//! the Ptolemy relation, and every lambda length sounds as a tone.

pub mod audio;
pub mod chord;
pub mod farey;
mod json_int;
pub mod session;
pub mod surface;
pub mod tessellation;
