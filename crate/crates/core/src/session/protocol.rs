use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::farey::{DiskPoint, ExtendedRational, GeodesicArc};
use crate::tessellation::{EdgeKey, TriangleKey};

pub const PROTOCOL_VERSION: u32 = 1;

/// A message from the client. Universal sessions address edges by their
/// endpoints, equivariant sessions by quotient edge ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    Hello {
        version: u32,
    },
    Viewport {
        gen: u64,
    },
    Tap {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge: Option<EdgeKey>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge_id: Option<usize>,
    },
    HoldStart {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge: Option<EdgeKey>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge_id: Option<usize>,
        d: f64,
    },
    HoldStop {
        hold_id: u64,
    },
    PedalTap {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge: Option<EdgeKey>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge_id: Option<usize>,
    },
    TriangleTap {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<TriangleKey>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tri_id: Option<usize>,
    },
    Mode {
        equivariant: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<String>,
    },
}

impl Request {
    pub fn tap(edge: EdgeKey) -> Self {
        Request::Tap { edge: Some(edge), edge_id: None }
    }

    pub fn tap_id(id: usize) -> Self {
        Request::Tap { edge: None, edge_id: Some(id) }
    }

    pub fn pedal(edge: EdgeKey) -> Self {
        Request::PedalTap { edge: Some(edge), edge_id: None }
    }

    pub fn pedal_id(id: usize) -> Self {
        Request::PedalTap { edge: None, edge_id: Some(id) }
    }

    /// Whether the message advances the session clock.
    pub(crate) fn sounds(&self) -> bool {
        matches!(
            self,
            Request::Tap { .. }
                | Request::HoldStart { .. }
                | Request::HoldStop { .. }
                | Request::PedalTap { .. }
                | Request::TriangleTap { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeTag {
    pub equivariant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeView {
    pub a: ExtendedRational,
    pub b: ExtendedRational,
    #[serde(with = "crate::json_int")]
    pub lambda: BigInt,
    pub arc: GeodesicArc,
    pub frets: Vec<DiskPoint>,
    /// `(tail, head)`: from lower to higher generation.
    pub orient: (ExtendedRational, ExtendedRational),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_id: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleView {
    pub vertices: [ExtendedRational; 3],
    #[serde(with = "crate::json_int::array")]
    pub chord: [BigInt; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tri_id: Option<usize>,
}

/// A message from the server.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Response {
    Hello {
        version: u32,
        session: String,
    },
    Tone {
        freq: f64,
        dur: f64,
        ch: u8,
        t: f64,
        #[serde(with = "crate::json_int")]
        lambda: BigInt,
    },
    ToneStart {
        hold_id: u64,
        freq: f64,
        ch: u8,
        t: f64,
    },
    ToneStop {
        hold_id: u64,
        t: f64,
        dur: f64,
    },
    Tessellation {
        gen: u64,
        edges: Vec<EdgeView>,
        triangles: Vec<TriangleView>,
    },
    Error {
        reason: String,
    },
}

/// A response as sent on the wire, stamped with the session mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelope {
    #[serde(flatten)]
    pub body: Response,
    pub mode: ModeTag,
}

impl Envelope {
    pub fn is_error(&self) -> bool {
        matches!(self.body, Response::Error { .. })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("responses serialize")
    }
}

/// Field-for-field copy of [`Request`] with the tag outside, so that
/// deserialization errors keep their path.
#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum Tagged {
    Hello { version: u32 },
    Viewport { gen: u64 },
    Tap {
        #[serde(default)]
        edge: Option<EdgeKey>,
        #[serde(default)]
        edge_id: Option<usize>,
    },
    HoldStart {
        #[serde(default)]
        edge: Option<EdgeKey>,
        #[serde(default)]
        edge_id: Option<usize>,
        d: f64,
    },
    HoldStop { hold_id: u64 },
    PedalTap {
        #[serde(default)]
        edge: Option<EdgeKey>,
        #[serde(default)]
        edge_id: Option<usize>,
    },
    TriangleTap {
        #[serde(default)]
        vertices: Option<TriangleKey>,
        #[serde(default)]
        tri_id: Option<usize>,
    },
    Mode {
        equivariant: bool,
        #[serde(default)]
        group: Option<String>,
    },
}

impl From<Tagged> for Request {
    fn from(t: Tagged) -> Self {
        match t {
            Tagged::Hello { version } => Request::Hello { version },
            Tagged::Viewport { gen } => Request::Viewport { gen },
            Tagged::Tap { edge, edge_id } => Request::Tap { edge, edge_id },
            Tagged::HoldStart { edge, edge_id, d } => Request::HoldStart { edge, edge_id, d },
            Tagged::HoldStop { hold_id } => Request::HoldStop { hold_id },
            Tagged::PedalTap { edge, edge_id } => Request::PedalTap { edge, edge_id },
            Tagged::TriangleTap { vertices, tri_id } => Request::TriangleTap { vertices, tri_id },
            Tagged::Mode { equivariant, group } => Request::Mode { equivariant, group },
        }
    }
}

/// Parses one request, naming the offending field on failure.
pub fn parse_request(line: &str) -> Result<Request, String> {
    let mut de = serde_json::Deserializer::from_str(line);
    let value = serde_json::Value::deserialize(&mut de).map_err(|e| e.to_string())?;
    de.end().map_err(|e| e.to_string())?;
    let serde_json::Value::Object(mut fields) = value else {
        return Err("request must be a JSON object".into());
    };
    let kind = match fields.remove("type") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err("type: expected a string".into()),
        None => return Err("missing field `type`".into()),
    };
    let wrapped = serde_json::Value::Object([(kind, fields.into())].into_iter().collect());
    let tagged: Tagged = serde_path_to_error::deserialize(wrapped).map_err(|e| {
        let path = e.path().to_string();
        match path.split_once('.') {
            Some((_, field)) if !field.is_empty() => format!("{field}: {}", e.inner()),
            _ => e.inner().to_string(),
        }
    })?;
    Ok(tagged.into())
}
