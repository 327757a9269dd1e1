use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::{HybridModel, Init, Mode, ModeId, Transition, TransitionId, VarKind, Variable};
use crate::expr::{self, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    variables: Vec<RawVar>,
    modes: Vec<RawMode>,
    transitions: Vec<RawTransition>,
    initial_mode: ModeId,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawInit {
    Interval([f64; 2]),
    Value(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVar {
    name: String,
    kind: VarKind,
    #[serde(default)]
    init: Option<RawInit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    init_relative_to: Option<String>,
}

fn true_text() -> String {
    "true".to_string()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMode {
    id: ModeId,
    name: String,
    #[serde(default = "true_text")]
    invariant: String,
    #[serde(default)]
    flow: BTreeMap<String, String>,
    #[serde(default)]
    copy_of: Option<ModeId>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    id: TransitionId,
    source: ModeId,
    destination: ModeId,
    guard: String,
    #[serde(default)]
    reset: BTreeMap<String, String>,
    priority: u32,
}

impl HybridModel {
    /// Parses the JSON model format. Syntax errors and malformed expressions
    /// are reported with a line and column. Semantic problems are left to
    /// [`super::validate`].
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| FormatError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let expr = |s: &str, what: &str| -> Result<Expr, FormatError> {
            expr::parse(s).map_err(|e| {
                let (line, column) = locate(text, s);
                FormatError { line, column: column + e.offset, message: format!("{what}: {}", e.message) }
            })
        };
        let variables = raw
            .variables
            .into_iter()
            .map(|v| Variable {
                init: match v.init {
                    Some(RawInit::Interval([lo, hi])) => Init::Interval(lo, hi),
                    Some(RawInit::Value(x)) => Init::Value(x),
                    None => Init::Unset,
                },
                name: v.name,
                kind: v.kind,
                init_relative_to: v.init_relative_to,
            })
            .collect();
        let mut modes = Vec::new();
        for m in raw.modes {
            let mut flow = BTreeMap::new();
            for (k, v) in &m.flow {
                flow.insert(k.clone(), expr(v, &format!("flow of '{k}' in mode '{}'", m.name))?);
            }
            modes.push(Mode {
                id: m.id,
                invariant: expr(&m.invariant, &format!("invariant of mode '{}'", m.name))?,
                name: m.name,
                flow,
                copy_of: m.copy_of,
            });
        }
        let mut transitions = Vec::new();
        for t in raw.transitions {
            let mut reset = BTreeMap::new();
            for (k, v) in &t.reset {
                reset.insert(k.clone(), expr(v, &format!("reset of '{k}' in transition {}", t.id))?);
            }
            transitions.push(Transition {
                id: t.id,
                source: t.source,
                destination: t.destination,
                guard: expr(&t.guard, &format!("guard of transition {}", t.id))?,
                reset,
                priority: t.priority,
            });
        }
        Ok(HybridModel { name: raw.name, variables, modes, transitions, initial_mode: raw.initial_mode })
    }

    /// Canonical pretty-printed JSON with a trailing newline. Expressions are
    /// printed fully parenthesised, maps are key-sorted.
    pub fn to_json(&self) -> String {
        let raw = RawModel {
            name: self.name.clone(),
            variables: self
                .variables
                .iter()
                .map(|v| RawVar {
                    name: v.name.clone(),
                    kind: v.kind,
                    init: match v.init {
                        Init::Interval(lo, hi) => Some(RawInit::Interval([lo, hi])),
                        Init::Value(x) => Some(RawInit::Value(x)),
                        Init::Unset => None,
                    },
                    init_relative_to: v.init_relative_to.clone(),
                })
                .collect(),
            modes: self
                .modes
                .iter()
                .map(|m| RawMode {
                    id: m.id,
                    name: m.name.clone(),
                    invariant: m.invariant.to_string(),
                    flow: m.flow.iter().map(|(k, e)| (k.clone(), e.to_string())).collect(),
                    copy_of: m.copy_of,
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| RawTransition {
                    id: t.id,
                    source: t.source,
                    destination: t.destination,
                    guard: t.guard.to_string(),
                    reset: t.reset.iter().map(|(k, e)| (k.clone(), e.to_string())).collect(),
                    priority: t.priority,
                })
                .collect(),
            initial_mode: self.initial_mode,
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("model serialisation cannot fail");
        s.push('\n');
        s
    }
}

/// Line and column (1-based) of the first JSON string literal equal to `s`.
fn locate(text: &str, s: &str) -> (usize, usize) {
    let needle = serde_json::to_string(s).unwrap_or_default();
    let Some(at) = text.find(&needle) else {
        return (0, 0);
    };
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = at - before.rfind('\n').map_or(0, |i| i + 1) + 2;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "name": "bounce",
  "variables": [
    {"name": "x", "kind": "state", "init": [1, 2]},
    {"name": "v", "kind": "state", "init": [0, 0]},
    {"name": "g", "kind": "param", "init": 9.81},
    {"name": "u", "kind": "input", "init": null}
  ],
  "modes": [
    {"id": 0, "name": "fall", "invariant": "x >= -1", "flow": {"x": "v", "v": "-g + u"}, "copy_of": null}
  ],
  "transitions": [
    {"id": 0, "source": 0, "destination": 0, "guard": "x <= 0 && v < 0", "reset": {"v": "-0.8 * v"}, "priority": 1}
  ],
  "initial_mode": 0
}"#;

    #[test]
    fn parses_and_round_trips() {
        let m = HybridModel::from_json(SMALL).unwrap();
        assert_eq!(m.variables.len(), 4);
        assert_eq!(m.var("g").unwrap().init, Init::Value(9.81));
        assert_eq!(m.var("u").unwrap().init, Init::Unset);
        let text = m.to_json();
        let back = HybridModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn syntax_error_has_position() {
        let broken = SMALL.replace("\"initial_mode\": 0", "\"initial_mode\": ");
        let err = HybridModel::from_json(&broken).unwrap_err();
        assert!(err.line > 1, "{err}");
    }

    #[test]
    fn bad_expression_is_located() {
        let broken = SMALL.replace("x <= 0 && v < 0", "x <= && v");
        let err = HybridModel::from_json(&broken).unwrap_err();
        assert_eq!(err.line, 13, "{err}");
        assert!(err.message.contains("guard of transition 0"), "{err}");
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let broken = SMALL.replace("\"kind\": \"input\"", "\"kind\": \"wire\"");
        assert!(HybridModel::from_json(&broken).is_err());
    }
}
