use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AudioError, NoteEvent, Score};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Waveform {
    #[default]
    Sine,
    Square,
    Saw,
}

impl Waveform {
    /// One period of the wave at phase `x ∈ [0, 1)`.
    fn at(self, x: f64) -> f64 {
        match self {
            Waveform::Sine => (std::f64::consts::TAU * x).sin(),
            Waveform::Square => {
                if x < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            Waveform::Saw => 2.0 * x - 1.0,
        }
    }
}

/// Linear attack, exponential decay while the note is held, linear release.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub attack: f64,
    pub decay: f64,
    pub release: f64,
}

impl Default for Envelope {
    fn default() -> Self {
        Self {
            attack: 0.010,
            decay: 0.3,
            release: 0.020,
        }
    }
}

impl Envelope {
    fn held(&self, s: f64) -> f64 {
        if s < self.attack {
            s / self.attack
        } else {
            (-(s - self.attack) / self.decay).exp()
        }
    }

    /// Gain `s` seconds into a note lasting `dur` seconds.
    fn gain(&self, s: f64, dur: f64) -> f64 {
        if s < 0.0 {
            0.0
        } else if s < dur {
            self.held(s)
        } else if s < dur + self.release {
            self.held(dur) * (1.0 - (s - dur) / self.release)
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub sample_rate: u32,
    pub bit_depth: u16,
    /// Waveform by channel; channels not listed play sine waves.
    pub waveforms: BTreeMap<u8, Waveform>,
    pub envelope: Envelope,
    pub peak: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sample_rate: 44100,
            bit_depth: 16,
            waveforms: BTreeMap::new(),
            envelope: Envelope::default(),
            peak: 0.89,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), AudioError> {
        let bad = |m: String| Err(AudioError::Synth(m));
        if self.sample_rate < 8000 {
            return bad(format!("sample rate {} is below 8000", self.sample_rate));
        }
        if self.bit_depth != 16 {
            return bad(format!("only 16-bit output is supported, got {}", self.bit_depth));
        }
        if !(self.peak > 0.0 && self.peak < 1.0) {
            return bad(format!("peak target {} must lie in (0, 1)", self.peak));
        }
        let e = &self.envelope;
        if !(e.attack > 0.0 && e.decay > 0.0 && e.release > 0.0) {
            return bad("envelope times must be positive".into());
        }
        Ok(())
    }

    fn waveform(&self, ch: u8) -> Waveform {
        self.waveforms.get(&ch).copied().unwrap_or_default()
    }
}

const BLOCK: usize = 4096;

/// Unnormalized mix of the score. Each sample sums its notes in score
/// order, so splitting the work into blocks does not change the result.
pub fn render_samples(score: &Score, cfg: &SynthConfig) -> Result<Vec<f64>, AudioError> {
    cfg.validate()?;
    let rate = cfg.sample_rate as f64;
    let release = cfg.envelope.release;
    let len = if score.events().is_empty() {
        0
    } else {
        ((score.end() + release) * rate).ceil() as usize
    };
    let mut out = vec![0.0; len];
    out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, block)| {
        let first = b * BLOCK;
        let last = first + block.len();
        for e in score.events() {
            let start = (e.t * rate).ceil() as usize;
            let stop = (((e.end() + release) * rate).ceil() as usize).min(last);
            let wave = cfg.waveform(e.ch);
            for n in start.max(first)..stop {
                let s = n as f64 / rate - e.t;
                let phase = (e.freq * s).rem_euclid(1.0);
                block[n - first] += e.vel * cfg.envelope.gain(s, e.dur) * wave.at(phase);
            }
        }
    });
    Ok(out)
}

fn round_half_away(x: f64) -> f64 {
    (x.abs() + 0.5).floor().copysign(x)
}

/// 16-bit PCM after scaling the mix so its peak sits at the target.
fn quantize(samples: &[f64], peak: f64) -> Vec<i16> {
    let top = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if top > 0.0 { peak / top } else { 0.0 };
    samples
        .iter()
        .map(|x| round_half_away(x * scale * 32767.0).clamp(-32768.0, 32767.0) as i16)
        .collect()
}

/// A mono 16-bit RIFF/WAVE file: the 44-byte canonical header, then the samples.
pub fn wav_bytes(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let data_len = (samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn render_wav(score: &Score, cfg: &SynthConfig) -> Result<Vec<u8>, AudioError> {
    let mix = render_samples(score, cfg)?;
    Ok(wav_bytes(&quantize(&mix, cfg.peak), cfg.sample_rate))
}

impl NoteEvent {
    pub fn sine(t: f64, dur: f64, freq: f64) -> Self {
        Self { t, dur, freq, vel: 1.0, ch: 0 }
    }
}
