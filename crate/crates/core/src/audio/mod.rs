//! Tones from lambda lengths: temperings, frets, scores and a small additive
//! synthesizer that writes WAV files.

mod melody;
mod score;
mod synth;
mod tempering;

use thiserror::Error;

pub use melody::{compile_melody, happy_birthday, Melody};
pub use score::{
    arpeggio, quotient_arpeggio, tap_event, triangle_event, universal_arpeggio, NoteEvent, PlayConfig, Score,
    ScoreMeta,
};
pub use synth::{render_samples, render_wav, wav_bytes, Envelope, SynthConfig, Waveform};
pub(crate) use tempering::lambda_i64;
pub use tempering::{fret_frequency, freq_of_lambda, hold_frequency, FretSpec, Ratio, Tempering, DEFAULT_OCTAVE_SHIFT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AudioError {
    #[error("invalid tempering: {0}")]
    Tempering(String),
    #[error("hemitone {0} is below the instrument (must be at least 1)")]
    BelowRange(i64),
    #[error("lambda {0} is too large to sound")]
    OutOfRange(String),
    #[error("invalid note event: {0}")]
    Event(String),
    #[error("invalid synth config: {0}")]
    Synth(String),
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("melody is empty")]
    EmptyMelody,
    #[error(transparent)]
    Tessellation(#[from] crate::tessellation::TessellationError),
    #[error(transparent)]
    Surface(#[from] crate::surface::SurfaceError),
}
