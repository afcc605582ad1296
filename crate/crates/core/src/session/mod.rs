//! Deterministic play sessions: a state machine fed by protocol messages,
//! an append-only event log that replays to the same state, and a
//! newline-delimited JSON server.

mod persist;
mod protocol;
mod server;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::audio::{hold_frequency, lambda_i64, tap_event, triangle_event, FretSpec, NoteEvent, PlayConfig, Score, SynthConfig};
use crate::farey::{geodesic_arc, orient_edge, ExtendedRational};
use crate::surface::{builtin_group, develop, CosetTable, QuotientTriangulation};
use crate::tessellation::{EdgeKey, TessellationPatch};

pub use persist::{load_session, parse_session_file, save_session, SessionError, SessionFile};
pub use protocol::{parse_request, EdgeView, Envelope, ModeTag, Request, Response, TriangleView, PROTOCOL_VERSION};
pub use server::{serve, serve_connection};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub play: PlayConfig,
    pub synth: SynthConfig,
    /// Seconds between consecutive sounding events.
    pub clock_step: f64,
    /// Generation bound of the view sent after a pedal-tap until the client
    /// asks for another.
    pub viewport_gen: u64,
    /// Largest generation a client may request.
    pub max_gen: u64,
    /// Frets drawn on each side of the distinguished one.
    pub frets: i64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            play: PlayConfig::default(),
            synth: SynthConfig::default(),
            clock_step: 0.3,
            viewport_gen: 3,
            max_gen: 10,
            frets: 12,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.clock_step > 0.0 && self.clock_step.is_finite()) {
            return Err(format!("clock_step must be positive, got {}", self.clock_step));
        }
        if self.viewport_gen > self.max_gen {
            return Err(format!("viewport_gen {} exceeds max_gen {}", self.viewport_gen, self.max_gen));
        }
        if self.frets < 0 {
            return Err(format!("frets must be non-negative, got {}", self.frets));
        }
        self.synth.validate().map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum State {
    Universal(TessellationPatch),
    Equivariant {
        group: String,
        table: CosetTable,
        q: QuotientTriangulation,
    },
}

/// A logged request with the time the session assigned to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogEntry {
    pub t: f64,
    pub msg: Request,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct OpenHold {
    t: f64,
    freq: f64,
    ch: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    id: String,
    config: SessionConfig,
    state: State,
    log: Vec<LogEntry>,
    clock: f64,
    holds: BTreeMap<u64, OpenHold>,
    next_hold: u64,
    view_gen: u64,
    score: Score,
}

const MAX_LIFT_DEPTH: u64 = 8;

impl Session {
    /// A universal session on the untouched Farey tessellation.
    pub fn new(id: impl Into<String>, config: SessionConfig) -> Self {
        let id = id.into();
        let mut meta = config.play.meta();
        meta.session = Some(id.clone());
        Self {
            view_gen: config.viewport_gen,
            score: Score::new(meta),
            id,
            config,
            state: State::Universal(TessellationPatch::new()),
            log: Vec::new(),
            clock: 0.0,
            holds: BTreeMap::new(),
            next_hold: 0,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn score(&self) -> &Score {
        &self.score
    }

    pub fn mode(&self) -> ModeTag {
        match &self.state {
            State::Universal(_) => ModeTag { equivariant: false, group: None },
            State::Equivariant { group, .. } => ModeTag {
                equivariant: true,
                group: Some(group.clone()),
            },
        }
    }

    pub fn patch(&self) -> Option<&TessellationPatch> {
        match &self.state {
            State::Universal(t) => Some(t),
            State::Equivariant { .. } => None,
        }
    }

    pub fn quotient(&self) -> Option<&QuotientTriangulation> {
        match &self.state {
            State::Universal(_) => None,
            State::Equivariant { q, .. } => Some(q),
        }
    }

    pub fn render_wav(&self) -> Result<Vec<u8>, crate::audio::AudioError> {
        crate::audio::render_wav(&self.score, &self.config.synth)
    }

    /// SHA-256 of everything that determines future behaviour.
    pub fn digest(&self) -> String {
        let state = match &self.state {
            State::Universal(t) => json!({ "patch": t }),
            State::Equivariant { group, q, .. } => json!({
                "group": group,
                "lambdas": q.lambdas().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "triangles": q.triangles(),
                "history": q.history(),
            }),
        };
        let all = json!({
            "id": self.id,
            "config": self.config,
            "state": state,
            "log": self.log,
            "clock": self.clock,
            "holds": self.holds,
            "next_hold": self.next_hold,
            "view_gen": self.view_gen,
            "score": self.score,
        });
        hex::encode(Sha256::digest(all.to_string().as_bytes()))
    }

    fn wrap(&self, body: Response) -> Envelope {
        Envelope { body, mode: self.mode() }
    }

    /// Parses and handles one line of the wire protocol.
    pub fn handle_line(&mut self, line: &str) -> Vec<Envelope> {
        match parse_request(line) {
            Ok(req) => self.handle(req),
            Err(reason) => vec![self.wrap(Response::Error { reason })],
        }
    }

    /// Applies a request. On error the session is left exactly as it was and
    /// a single error response is returned.
    pub fn handle(&mut self, req: Request) -> Vec<Envelope> {
        match self.apply(&req) {
            Ok(bodies) => {
                let t = self.clock;
                if !matches!(req, Request::Hello { .. }) {
                    self.log.push(LogEntry { t, msg: req.clone() });
                }
                if req.sounds() {
                    self.clock += self.config.clock_step;
                }
                bodies.into_iter().map(|b| self.wrap(b)).collect()
            }
            Err(reason) => vec![self.wrap(Response::Error { reason })],
        }
    }

    fn untouched(&self) -> bool {
        match &self.state {
            State::Universal(t) => t.is_pristine(),
            State::Equivariant { q, .. } => q.history().is_empty(),
        }
    }

    fn lambda_of(&self, edge: &Option<EdgeKey>, edge_id: &Option<usize>) -> Result<BigInt, String> {
        match (&self.state, edge, edge_id) {
            (State::Universal(t), Some(e), None) => {
                if t.contains_edge(e) {
                    Ok(e.lambda())
                } else {
                    Err(format!("edge {e} is not in the tessellation"))
                }
            }
            (State::Equivariant { q, .. }, None, Some(id)) => q.lambda(*id).cloned().map_err(|e| e.to_string()),
            (State::Universal(_), _, _) => Err("universal sessions address edges by \"edge\": [a, b]".into()),
            (State::Equivariant { .. }, _, _) => Err("equivariant sessions address edges by \"edge_id\"".into()),
        }
    }

    fn tone(&self, e: &NoteEvent, lambda: BigInt) -> Response {
        Response::Tone {
            freq: e.freq,
            dur: e.dur,
            ch: e.ch,
            t: e.t,
            lambda,
        }
    }

    fn apply(&mut self, req: &Request) -> Result<Vec<Response>, String> {
        let play = &self.config.play;
        let now = self.clock;
        match req {
            Request::Hello { version } => {
                if *version != PROTOCOL_VERSION {
                    return Err(format!("unsupported protocol version {version} (this server speaks {PROTOCOL_VERSION})"));
                }
                Ok(vec![Response::Hello {
                    version: PROTOCOL_VERSION,
                    session: self.id.clone(),
                }])
            }
            Request::Viewport { gen } => {
                if *gen > self.config.max_gen {
                    return Err(format!("generation {gen} exceeds the limit {}", self.config.max_gen));
                }
                let view = self.tessellation(*gen)?;
                self.view_gen = *gen;
                Ok(vec![view])
            }
            Request::Tap { edge, edge_id } => {
                let lambda = self.lambda_of(edge, edge_id)?;
                let e = tap_event(&lambda, now, play, self.untouched()).map_err(|e| e.to_string())?;
                let tone = self.tone(&e, lambda);
                self.score.push(e).map_err(|e| e.to_string())?;
                Ok(vec![tone])
            }
            Request::HoldStart { edge, edge_id, d } => {
                if !d.is_finite() {
                    return Err(format!("fret distance {d} is not finite"));
                }
                let lambda = self.lambda_of(edge, edge_id)?;
                let base = if play.untuned_convention && self.untouched() {
                    0
                } else {
                    lambda_i64(&lambda).map_err(|e| e.to_string())?
                };
                let freq = hold_frequency(base, *d, play.octave_shift, &play.tempering);
                if !(freq > 0.0 && freq.is_finite()) {
                    return Err(format!("hold at {d} is out of range"));
                }
                let id = self.next_hold;
                let ch = play.channel;
                self.holds.insert(id, OpenHold { t: now, freq, ch });
                self.next_hold += 1;
                Ok(vec![Response::ToneStart { hold_id: id, freq, ch, t: now }])
            }
            Request::HoldStop { hold_id } => {
                let hold = self.holds.get(hold_id).ok_or_else(|| format!("no open hold {hold_id}"))?;
                let dur = now - hold.t;
                let note = NoteEvent {
                    t: hold.t,
                    dur,
                    freq: hold.freq,
                    vel: play.velocity,
                    ch: hold.ch,
                };
                note.validate().map_err(|e| e.to_string())?;
                self.holds.remove(hold_id);
                self.score.push(note).map_err(|e| e.to_string())?;
                Ok(vec![Response::ToneStop { hold_id: *hold_id, t: now, dur }])
            }
            Request::PedalTap { edge, edge_id } => {
                self.lambda_of(edge, edge_id)?;
                let (next, lambda) = match (&self.state, edge, edge_id) {
                    (State::Universal(t), Some(e), _) => {
                        let (next, _, record) = t.flipped(e).map_err(|e| e.to_string())?;
                        (State::Universal(next), record.inserted_lambda)
                    }
                    (State::Equivariant { group, table, q }, _, Some(id)) => {
                        let next = q.flipped(*id).map_err(|e| e.to_string())?;
                        let lambda = next.lambdas()[*id].clone();
                        let state = State::Equivariant {
                            group: group.clone(),
                            table: table.clone(),
                            q: next,
                        };
                        (state, lambda)
                    }
                    _ => unreachable!("addressing checked above"),
                };
                let e = tap_event(&lambda, now, play, false).map_err(|e| e.to_string())?;
                let tone = self.tone(&e, lambda);
                let before = std::mem::replace(&mut self.state, next);
                let view = match self.tessellation(self.view_gen) {
                    Ok(view) => view,
                    Err(err) => {
                        self.state = before;
                        return Err(err);
                    }
                };
                self.score.push(e).map_err(|e| e.to_string())?;
                Ok(vec![view, tone])
            }
            Request::TriangleTap { vertices, tri_id } => {
                let chord = match (&self.state, vertices, tri_id) {
                    (State::Universal(t), Some(tri), None) => t.triangle_chord(tri).map_err(|e| e.to_string())?,
                    (State::Equivariant { q, .. }, None, Some(id)) => q.triangle_chord(*id).map_err(|e| e.to_string())?,
                    (State::Universal(_), _, _) => return Err("universal sessions address triangles by \"vertices\"".into()),
                    (State::Equivariant { .. }, _, _) => return Err("equivariant sessions address triangles by \"tri_id\"".into()),
                };
                let notes = triangle_event(&chord, now, play).map_err(|e| e.to_string())?;
                let tones = notes.iter().zip(chord).map(|(e, l)| self.tone(e, l)).collect();
                self.score.extend(notes).map_err(|e| e.to_string())?;
                Ok(tones)
            }
            Request::Mode { equivariant, group } => {
                let state = match (equivariant, group) {
                    (false, None) => State::Universal(TessellationPatch::new()),
                    (false, Some(_)) => return Err("a universal session takes no group".into()),
                    (true, None) => return Err("equivariant mode needs a group".into()),
                    (true, Some(name)) => {
                        let table = builtin_group(name).map_err(|e| e.to_string())?;
                        State::Equivariant {
                            group: name.clone(),
                            q: QuotientTriangulation::new(&table),
                            table,
                        }
                    }
                };
                self.state = state;
                self.holds.clear();
                Ok(vec![self.tessellation(self.view_gen)?])
            }
        }
    }

    /// The geometry message for the current state.
    pub fn tessellation(&self, gen: u64) -> Result<Response, String> {
        let frets = self.config.frets;
        let view = |a: &ExtendedRational, b: &ExtendedRational, lambda: BigInt, edge_id| {
            let spec = FretSpec::new(a, b, (-frets, frets)).map_err(|e| e.to_string())?;
            Ok::<_, String>(EdgeView {
                a: a.clone(),
                b: b.clone(),
                lambda,
                arc: geodesic_arc(a, b).map_err(|e| e.to_string())?,
                frets: spec.frets(),
                orient: orient_edge(a, b),
                edge_id,
            })
        };
        let (edges, triangles) = match &self.state {
            State::Universal(t) => {
                let edges = t
                    .viewport_keys(gen)
                    .iter()
                    .map(|k| view(k.lo(), k.hi(), k.lambda(), None))
                    .collect::<Result<_, _>>()?;
                let triangles = t
                    .faces_in_viewport(gen)
                    .into_iter()
                    .map(|f| TriangleView {
                        chord: f.chord(),
                        vertices: f.vertices().clone(),
                        tri_id: None,
                    })
                    .collect();
                (edges, triangles)
            }
            State::Equivariant { table, q, .. } => {
                let lift = develop(q, table, gen.min(MAX_LIFT_DEPTH) as usize).map_err(|e| e.to_string())?;
                let edges = lift
                    .edges()
                    .iter()
                    .map(|((a, b), label)| view(a, b, q.dart_lambda(*label).clone(), Some(q.edge_of(*label))))
                    .collect::<Result<_, _>>()?;
                let triangles = lift
                    .faces
                    .iter()
                    .map(|f| {
                        let mut chord = f.labels.map(|l| q.dart_lambda(l).clone());
                        chord.sort();
                        TriangleView {
                            vertices: f.vertices.clone(),
                            chord,
                            tri_id: Some(q.slot(f.labels[0]).0),
                        }
                    })
                    .collect();
                (edges, triangles)
            }
        };
        Ok(Response::Tessellation { gen, edges, triangles })
    }
}
