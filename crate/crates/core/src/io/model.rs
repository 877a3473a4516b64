use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::automaton::{AnnotatedModel, FaultSpec, Lfsa, ModelError, RawLfsa, SecretSpec};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateEntry {
    pub id: String,
    #[serde(default)]
    pub initial: bool,
    #[serde(default)]
    pub secret: bool,
}

/// `label: null` (or a missing label) declares an unobservable event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventEntry {
    pub id: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub faulty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub from: String,
    pub event: String,
    pub to: String,
}

/// The JSON model format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: String,
    pub states: Vec<StateEntry>,
    pub events: Vec<EventEntry>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: unknown field `{field}`")]
    UnknownField { path: String, field: String },
    #[error("unsupported format_version `{0}` (expected `{FORMAT_VERSION}`)")]
    Version(String),
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject fields the format does not define.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

/// Parses a JSON model in strict mode.
pub fn parse_model(text: &str) -> Result<AnnotatedModel, ParseError> {
    parse_model_with(text, ParseOptions::default())
}

pub fn parse_model_with(text: &str, opts: ParseOptions) -> Result<AnnotatedModel, ParseError> {
    let doc: ModelDocument = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if opts.strict {
        let value: Value = serde_json::from_str(text).expect("already parsed once");
        check_fields(&value)?;
    }
    doc.to_model()
}

fn check_fields(value: &Value) -> Result<(), ParseError> {
    let check = |v: &Value, path: &str, allowed: &[&str]| -> Result<(), ParseError> {
        if let Value::Object(map) = v {
            if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(ParseError::UnknownField {
                    path: path.to_string(),
                    field: k.clone(),
                });
            }
        }
        Ok(())
    };
    check(value, "/", &["format_version", "states", "events", "transitions"])?;
    let sections: [(&str, &[&str]); 3] = [
        ("states", &["id", "initial", "secret"]),
        ("events", &["id", "label", "faulty"]),
        ("transitions", &["from", "event", "to"]),
    ];
    for (section, allowed) in sections {
        if let Some(Value::Array(items)) = value.get(section) {
            for (i, item) in items.iter().enumerate() {
                check(item, &format!("/{section}/{i}"), allowed)?;
            }
        }
    }
    Ok(())
}

impl ModelDocument {
    /// Validates the document into an annotated model.
    pub fn to_model(&self) -> Result<AnnotatedModel, ParseError> {
        if self.format_version != FORMAT_VERSION {
            return Err(ParseError::Version(self.format_version.clone()));
        }
        let locate = |err: ModelError| {
            let path = match &err {
                ModelError::UndeclaredState { state, .. } | ModelError::UndeclaredEvent { event: state, .. } => self
                    .transitions
                    .iter()
                    .position(|t| &t.from == state || &t.to == state || &t.event == state)
                    .map_or("/".to_string(), |i| format!("/transitions/{i}")),
                ModelError::Duplicate { kind, id } | ModelError::InvalidIdentifier { kind, id, .. } => {
                    let (section, pos) = match *kind {
                        "state" => ("states", self.states.iter().rposition(|s| &s.id == id)),
                        "event" => ("events", self.events.iter().rposition(|e| &e.id == id)),
                        _ => ("events", self.events.iter().position(|e| e.label.as_ref() == Some(id))),
                    };
                    pos.map_or("/".to_string(), |i| format!("/{section}/{i}"))
                }
                _ => "/".to_string(),
            };
            ParseError::Model { path, source: err }
        };
        let mut raw = RawLfsa::new();
        for s in &self.states {
            raw = raw.state(&s.id);
            if s.initial {
                raw = raw.initial(&s.id);
            }
        }
        for e in &self.events {
            raw = raw.event(&e.id, e.label.as_deref());
        }
        for t in &self.transitions {
            raw = raw.transition(&t.from, &t.event, &t.to);
        }
        let lfsa = Lfsa::validate(raw.derive_outputs()).map_err(locate)?;
        let faults = FaultSpec::from_names(
            &lfsa,
            self.events.iter().filter(|e| e.faulty).map(|e| e.id.as_str()),
        )
        .map_err(locate)?;
        let secrets = SecretSpec::from_names(
            &lfsa,
            self.states.iter().filter(|s| s.secret).map(|s| s.id.as_str()),
        )
        .map_err(locate)?;
        Ok(AnnotatedModel {
            lfsa,
            faults,
            secrets,
        })
    }

    pub fn from_model(model: &AnnotatedModel) -> ModelDocument {
        let m = &model.lfsa;
        ModelDocument {
            format_version: FORMAT_VERSION.to_string(),
            states: m
                .state_ids()
                .map(|q| StateEntry {
                    id: m.state_name(q).to_string(),
                    initial: m.initial().contains(q),
                    secret: model.secrets.is_secret(q),
                })
                .collect(),
            events: m
                .event_ids()
                .map(|e| EventEntry {
                    id: m.event_name(e).to_string(),
                    label: m.label(e).map(|a| m.output_name(a).to_string()),
                    faulty: model.faults.is_faulty(e),
                })
                .collect(),
            transitions: m
                .transitions()
                .iter()
                .map(|t| TransitionEntry {
                    from: m.state_name(t.from).to_string(),
                    event: m.event_name(t.event).to_string(),
                    to: m.state_name(t.to).to_string(),
                })
                .collect(),
        }
    }

    /// Canonical pretty-printed JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serialization");
        s.push('\n');
        s
    }
}

/// Canonical serialization of a model.
pub fn serialize_model(model: &AnnotatedModel) -> String {
    ModelDocument::from_model(model).to_json()
}
