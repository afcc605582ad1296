use serde::{Deserialize, Serialize};

use super::{EdgeKey, FlipRecord, TessellationError, TessellationPatch};

/// One step of a tuning script: `{"edge": ["p/q", "r/s"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipInstruction {
    pub edge: EdgeKey,
}

/// Parses a JSON tuning script.
pub fn parse_tuning(json: &str) -> Result<Vec<FlipInstruction>, serde_json::Error> {
    serde_json::from_str(json)
}

impl TessellationPatch {
    /// Applies the script in order, stopping at the first failing step.
    pub fn apply_script(&mut self, script: &[FlipInstruction]) -> Result<Vec<FlipRecord>, (usize, TessellationError)> {
        let mut records = Vec::with_capacity(script.len());
        for (i, step) in script.iter().enumerate() {
            records.push(self.flip(&step.edge).map_err(|e| (i, e))?);
        }
        Ok(records)
    }

    /// The flips of the history as a script that rebuilds this patch.
    pub fn to_script(&self) -> Vec<FlipInstruction> {
        self.history()
            .iter()
            .map(|r| FlipInstruction { edge: r.removed.clone() })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_round_trip() {
        let script = parse_tuning(r#"[{"edge":["0/1","1/0"]},{"edge":["1/1","1/0"]}]"#).unwrap();
        let mut t = TessellationPatch::new();
        let recs = t.apply_script(&script).unwrap();
        assert_eq!(recs[1].inserted_lambda, 3.into());
        assert_eq!(t.to_script(), script);
        let json = serde_json::to_string(&script).unwrap();
        assert_eq!(json, r#"[{"edge":["0/1","1/0"]},{"edge":["1/1","1/0"]}]"#);
    }

    #[test]
    fn failing_step_is_reported() {
        let script = parse_tuning(r#"[{"edge":["0/1","1/0"]},{"edge":["0/1","1/0"]}]"#).unwrap();
        let mut t = TessellationPatch::new();
        let (step, err) = t.apply_script(&script).unwrap_err();
        assert_eq!(step, 1);
        assert!(matches!(err, TessellationError::MissingEdge(_)));
        assert!(parse_tuning(r#"[{"edge":["0/1","0/1"]}]"#).is_err());
        assert!(parse_tuning(r#"[{"edge":["0/1","1/0"],"x":1}]"#).is_err());
    }
}
