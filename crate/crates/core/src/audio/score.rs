use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::tempering::lambda_i64;
use super::{freq_of_lambda, AudioError, Tempering, DEFAULT_OCTAVE_SHIFT};
use crate::farey::ExtendedRational;
use crate::surface::QuotientTriangulation;
use crate::tessellation::TessellationPatch;

/// One note. Times are in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoteEvent {
    pub t: f64,
    pub dur: f64,
    pub freq: f64,
    #[serde(default = "unit")]
    pub vel: f64,
    #[serde(default)]
    pub ch: u8,
}

fn unit() -> f64 {
    1.0
}

impl NoteEvent {
    pub fn validate(&self) -> Result<(), AudioError> {
        let bad = |m: String| Err(AudioError::Event(m));
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("start {} must be a finite non-negative time", self.t));
        }
        if !(self.dur > 0.0 && self.dur.is_finite()) {
            return bad(format!("duration {} must be positive", self.dur));
        }
        if !(self.freq > 0.0 && self.freq.is_finite()) {
            return bad(format!("frequency {} must be positive", self.freq));
        }
        if !(0.0..=1.0).contains(&self.vel) {
            return bad(format!("velocity {} must lie in [0, 1]", self.vel));
        }
        Ok(())
    }

    pub fn end(&self) -> f64 {
        self.t + self.dur
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreMeta {
    pub tempering: String,
    pub octave_shift: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
}

impl Default for ScoreMeta {
    fn default() -> Self {
        Self {
            tempering: "equal".into(),
            octave_shift: DEFAULT_OCTAVE_SHIFT,
            session: None,
        }
    }
}

/// Notes sorted by start time; notes with equal starts keep insertion order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScoreRepr")]
pub struct Score {
    pub meta: ScoreMeta,
    events: Vec<NoteEvent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreRepr {
    meta: ScoreMeta,
    events: Vec<NoteEvent>,
}

impl TryFrom<ScoreRepr> for Score {
    type Error = AudioError;

    fn try_from(r: ScoreRepr) -> Result<Self, AudioError> {
        let mut s = Score::new(r.meta);
        for e in r.events {
            s.push(e)?;
        }
        Ok(s)
    }
}

impl Score {
    pub fn new(meta: ScoreMeta) -> Self {
        Self { meta, events: Vec::new() }
    }

    pub fn push(&mut self, e: NoteEvent) -> Result<(), AudioError> {
        e.validate()?;
        let at = self.events.partition_point(|x| x.t <= e.t);
        self.events.insert(at, e);
        Ok(())
    }

    pub fn extend(&mut self, events: impl IntoIterator<Item = NoteEvent>) -> Result<(), AudioError> {
        events.into_iter().try_for_each(|e| self.push(e))
    }

    pub fn events(&self) -> &[NoteEvent] {
        &self.events
    }

    pub fn end(&self) -> f64 {
        self.events.iter().map(NoteEvent::end).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scores serialize")
    }
}

/// How taps turn into notes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlayConfig {
    pub tempering: Tempering,
    pub octave_shift: u32,
    /// Sound every edge of the untouched Farey tessellation at exactly 27.5 Hz.
    pub untuned_convention: bool,
    pub tap_duration: f64,
    pub burst_duration: f64,
    pub velocity: f64,
    pub channel: u8,
}

impl Default for PlayConfig {
    fn default() -> Self {
        Self {
            tempering: Tempering::equal(),
            octave_shift: DEFAULT_OCTAVE_SHIFT,
            untuned_convention: false,
            tap_duration: 0.3,
            burst_duration: 0.25,
            velocity: 1.0,
            channel: 0,
        }
    }
}

impl PlayConfig {
    pub fn meta(&self) -> ScoreMeta {
        ScoreMeta {
            tempering: self.tempering.name.clone(),
            octave_shift: self.octave_shift,
            session: None,
        }
    }

    pub fn frequency(&self, lambda: &BigInt) -> Result<f64, AudioError> {
        freq_of_lambda(lambda_i64(lambda)?, self.octave_shift, &self.tempering)
    }

    fn note(&self, t: f64, dur: f64, freq: f64) -> NoteEvent {
        NoteEvent {
            t,
            dur,
            freq,
            vel: self.velocity,
            ch: self.channel,
        }
    }
}

/// A tap on an edge. `untouched` says the instrument has never been tuned,
/// which matters only under the untuned convention.
pub fn tap_event(lambda: &BigInt, t: f64, cfg: &PlayConfig, untouched: bool) -> Result<NoteEvent, AudioError> {
    let freq = if cfg.untuned_convention && untouched {
        440.0 / 16.0
    } else {
        cfg.frequency(lambda)?
    };
    Ok(cfg.note(t, cfg.tap_duration, freq))
}

/// The three tones of a triangle, sounded together.
pub fn triangle_event(chord: &[BigInt; 3], t: f64, cfg: &PlayConfig) -> Result<[NoteEvent; 3], AudioError> {
    let [x, y, z] = chord.each_ref().map(|l| cfg.frequency(l).map(|f| cfg.note(t, cfg.tap_duration, f)));
    Ok([x?, y?, z?])
}

/// A burst for each `(lambda, arc position)`, placed at `position · seconds_per_unit`.
pub fn arpeggio<'a>(
    crossings: impl IntoIterator<Item = (&'a BigInt, f64)>,
    seconds_per_unit: f64,
    cfg: &PlayConfig,
) -> Result<Score, AudioError> {
    if !(seconds_per_unit > 0.0) {
        return Err(AudioError::NonPositive("seconds per unit", seconds_per_unit));
    }
    let mut score = Score::new(cfg.meta());
    for (lambda, pos) in crossings {
        score.push(cfg.note(pos * seconds_per_unit, cfg.burst_duration, cfg.frequency(lambda)?))?;
    }
    Ok(score)
}

/// Arpeggio along the Farey horocycle at `center`.
pub fn universal_arpeggio(
    t: &TessellationPatch,
    center: &ExtendedRational,
    window: f64,
    seconds_per_unit: f64,
    cfg: &PlayConfig,
) -> Result<Score, AudioError> {
    let crossings = t.horocycle_crossings(center, window)?;
    arpeggio(crossings.iter().map(|c| (&c.lambda, c.position)), seconds_per_unit, cfg)
}

/// Arpeggio around a cusp of a quotient surface.
pub fn quotient_arpeggio(
    q: &QuotientTriangulation,
    cusp: usize,
    window: f64,
    seconds_per_unit: f64,
    cfg: &PlayConfig,
) -> Result<Score, AudioError> {
    let crossings = q.cusp_crossings(cusp, window)?;
    arpeggio(crossings.iter().map(|c| (&c.lambda, c.position)), seconds_per_unit, cfg)
}
