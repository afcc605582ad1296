use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{LogEntry, Session, SessionConfig};

const FORMAT: &str = "hormonica-session";

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid session file at {path} (line {line}, column {column}): {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid session config: {0}")]
    Config(String),
    #[error("log entry {entry} does not replay: {reason}")]
    Replay { entry: usize, reason: String },
    #[error("state digest mismatch: file records {recorded}, replay gives {replayed}")]
    Digest { recorded: String, replayed: String },
}

/// On-disk form of a session: its config, the event log, and the digest of
/// the state the log replays to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionFile {
    pub format: String,
    pub version: u32,
    pub id: String,
    pub config: SessionConfig,
    pub log: Vec<LogEntry>,
    pub digest: String,
}

impl Session {
    pub fn to_file(&self) -> SessionFile {
        SessionFile {
            format: FORMAT.into(),
            version: 1,
            id: self.id.clone(),
            config: self.config.clone(),
            log: self.log.clone(),
            digest: self.digest(),
        }
    }

    /// Rebuilds a session by replaying `log` from scratch. Every entry must
    /// succeed at the time it was recorded.
    pub fn replay(id: &str, config: SessionConfig, log: &[LogEntry]) -> Result<Self, SessionError> {
        config.validate().map_err(SessionError::Config)?;
        let mut s = Session::new(id, config);
        for (entry, e) in log.iter().enumerate() {
            if e.t != s.clock {
                return Err(SessionError::Replay {
                    entry,
                    reason: format!("recorded at t = {} but the clock reads {}", e.t, s.clock),
                });
            }
            let out = s.handle(e.msg.clone());
            if let Some(err) = out.iter().find(|r| r.is_error()) {
                return Err(SessionError::Replay {
                    entry,
                    reason: err.to_json(),
                });
            }
            if s.log.len() != entry + 1 {
                return Err(SessionError::Replay {
                    entry,
                    reason: "message is not one that gets logged".into(),
                });
            }
        }
        Ok(s)
    }

    pub fn from_file(file: &SessionFile) -> Result<Self, SessionError> {
        if file.format != FORMAT || file.version != 1 {
            return Err(SessionError::Config(format!(
                "unsupported format {:?} version {}",
                file.format, file.version
            )));
        }
        let s = Self::replay(&file.id, file.config.clone(), &file.log)?;
        let replayed = s.digest();
        if replayed != file.digest {
            return Err(SessionError::Digest {
                recorded: file.digest.clone(),
                replayed,
            });
        }
        Ok(s)
    }
}

/// Parses a session file, reporting the JSON path and position of any
/// schema violation.
pub fn parse_session_file(text: &str) -> Result<SessionFile, SessionError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        SessionError::Schema {
            path: e.path().to_string(),
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| SessionError::Schema {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(file)
}

pub fn save_session(s: &Session, path: &Path) -> Result<(), SessionError> {
    let text = serde_json::to_string_pretty(&s.to_file()).expect("sessions serialize");
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_session(path: &Path) -> Result<Session, SessionError> {
    let text = fs::read_to_string(path)?;
    Session::from_file(&parse_session_file(&text)?)
}
