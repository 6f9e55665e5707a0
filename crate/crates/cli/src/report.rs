use cardqe::qe::Theory;
use serde_json::{json, Map, Value};

/// One result, rendered as text or as a schema-1 JSON object.
pub struct Report {
    pub command: &'static str,
    pub input: String,
    /// `verdict` for decisions, `result` otherwise.
    pub key: &'static str,
    pub value: Value,
    pub trace: Option<Vec<String>>,
    pub text: String,
}

impl Report {
    pub fn new(command: &'static str, input: &str, key: &'static str, value: Value) -> Report {
        Report {
            command,
            input: input.to_string(),
            key,
            value,
            trace: None,
            text: String::new(),
        }
    }

    pub fn to_json(&self, theory: Theory, timing_ms: u64) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!(1));
        m.insert("command".into(), json!(self.command));
        m.insert("theory".into(), json!(theory));
        m.insert("input".into(), json!(self.input));
        m.insert(self.key.into(), self.value.clone());
        if let Some(t) = &self.trace {
            m.insert("trace".into(), json!(t));
        }
        m.insert("timing_ms".into(), json!(timing_ms));
        Value::Object(m)
    }
}
