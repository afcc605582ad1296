use num_bigint::BigInt;
use serde::Serialize;

use super::{AudioError, NoteEvent, PlayConfig, Score};
use crate::farey::ExtendedRational;
use crate::tessellation::{EdgeKey, FlipInstruction, TessellationPatch};

/// A melody laid out on the fan at `0`: a tuning script and one tap per note.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Melody {
    pub tuning: Vec<FlipInstruction>,
    pub taps: Vec<EdgeKey>,
    /// Number of fan flips, equal to the highest note.
    pub depth: u32,
}

fn fan_edge(m: u32) -> EdgeKey {
    EdgeKey::new(ExtendedRational::new(1, m).expect("m > 0"), ExtendedRational::infinity()).expect("distinct")
}

/// Flipping `{0, 1/k}` for `k = 1..=depth` leaves the edge `{1/m, ∞}` with
/// lambda length `m` between two fan triangles for every `m ≤ depth`; note
/// `m` is a tap on that edge.
pub fn compile_melody(hemitones: &[u32]) -> Result<Melody, AudioError> {
    let depth = *hemitones.iter().max().ok_or(AudioError::EmptyMelody)?;
    if let Some(&low) = hemitones.iter().find(|&&m| m == 0) {
        return Err(AudioError::BelowRange(low as i64));
    }
    let tuning = (1..=depth)
        .map(|k| FlipInstruction {
            edge: EdgeKey::new(ExtendedRational::zero(), ExtendedRational::new(1, k).expect("k > 0")).expect("distinct"),
        })
        .collect();
    Ok(Melody {
        tuning,
        taps: hemitones.iter().map(|&m| fan_edge(m)).collect(),
        depth,
    })
}

impl Melody {
    /// Tunes a fresh instrument and plays the taps `spacing` seconds apart.
    pub fn perform(&self, spacing: f64, cfg: &PlayConfig) -> Result<(TessellationPatch, Score), AudioError> {
        let mut t = TessellationPatch::new();
        t.apply_script(&self.tuning).map_err(|(_, e)| e)?;
        let mut score = Score::new(cfg.meta());
        for (k, e) in self.taps.iter().enumerate() {
            if !t.contains_edge(e) {
                return Err(crate::tessellation::TessellationError::MissingEdge(e.to_string()).into());
            }
            let freq = cfg.frequency(&e.lambda())?;
            score.push(NoteEvent {
                t: k as f64 * spacing,
                dur: cfg.tap_duration,
                freq,
                vel: cfg.velocity,
                ch: cfg.channel,
            })?;
        }
        Ok((t, score))
    }

    pub fn lambdas(&self) -> Vec<BigInt> {
        self.taps.iter().map(EdgeKey::lambda).collect()
    }
}

/// Happy Birthday to You, lowest note on hemitone 1.
pub fn happy_birthday() -> Vec<u32> {
    vec![
        1, 1, 3, 1, 6, 5, //
        1, 1, 3, 1, 8, 6, //
        1, 1, 13, 10, 6, 5, 3, //
        11, 11, 10, 6, 8, 6,
    ]
}
