use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransitionId(pub u32);

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TransitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    /// Continuous state with an initial interval.
    State,
    /// Constant during a run. Either fixed in the model or bound by the caller.
    Param,
    /// Driven by an external signal.
    Input,
    /// Auxiliary variable added by transformations (clocks, flags).
    Local,
}

impl VarKind {
    /// State and local variables are integrated and may be reset.
    pub fn is_integrated(self) -> bool {
        matches!(self, VarKind::State | VarKind::Local)
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::State => "state",
            VarKind::Param => "param",
            VarKind::Input => "input",
            VarKind::Local => "local",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Interval(f64, f64),
    Value(f64),
    Unset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub init: Init,
    /// When set, `init` is an offset interval added to the sampled initial
    /// value of the named state. This expresses coupled initial conditions
    /// such as "the estimate starts within 10 of the true distance".
    pub init_relative_to: Option<String>,
}

impl Variable {
    pub fn new(name: &str, kind: VarKind, init: Init) -> Self {
        Self { name: name.to_string(), kind, init, init_relative_to: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub id: ModeId,
    pub name: String,
    pub invariant: Expr,
    /// Derivative of each integrated variable, keyed by variable name.
    /// Local variables without an entry keep a constant value.
    pub flow: BTreeMap<String, Expr>,
    /// The mode this one was copied from by `addMode`.
    pub copy_of: Option<ModeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub id: TransitionId,
    pub source: ModeId,
    pub destination: ModeId,
    pub guard: Expr,
    /// Assignments evaluated on the pre-jump state.
    pub reset: BTreeMap<String, Expr>,
    /// 1 is the highest priority. Unique among transitions leaving a mode.
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub modes: Vec<Mode>,
    pub transitions: Vec<Transition>,
    pub initial_mode: ModeId,
}

impl HybridModel {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            variables: Vec::new(),
            modes: Vec::new(),
            transitions: Vec::new(),
            initial_mode: ModeId(0),
        }
    }

    pub fn var(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn var_mut(&mut self, name: &str) -> Option<&mut Variable> {
        self.variables.iter_mut().find(|v| v.name == name)
    }

    pub fn vars_of(&self, kind: VarKind) -> impl Iterator<Item = &Variable> {
        self.variables.iter().filter(move |v| v.kind == kind)
    }

    pub fn mode(&self, id: ModeId) -> Option<&Mode> {
        self.modes.iter().find(|m| m.id == id)
    }

    pub fn mode_mut(&mut self, id: ModeId) -> Option<&mut Mode> {
        self.modes.iter_mut().find(|m| m.id == id)
    }

    pub fn mode_by_name(&self, name: &str) -> Option<&Mode> {
        self.modes.iter().find(|m| m.name == name)
    }

    pub fn transition(&self, id: TransitionId) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.id == id)
    }

    pub fn transition_mut(&mut self, id: TransitionId) -> Option<&mut Transition> {
        self.transitions.iter_mut().find(|t| t.id == id)
    }

    /// Transitions leaving `mode`, highest priority first.
    pub fn outgoing(&self, mode: ModeId) -> Vec<&Transition> {
        let mut out: Vec<_> = self.transitions.iter().filter(|t| t.source == mode).collect();
        out.sort_by_key(|t| (t.priority, t.id));
        out
    }

    pub fn next_mode_id(&self) -> ModeId {
        ModeId(self.modes.iter().map(|m| m.id.0 + 1).max().unwrap_or(0))
    }

    pub fn next_transition_id(&self) -> TransitionId {
        TransitionId(self.transitions.iter().map(|t| t.id.0 + 1).max().unwrap_or(0))
    }

    /// Mode ids in ascending order.
    pub fn mode_ids(&self) -> Vec<ModeId> {
        let mut ids: Vec<_> = self.modes.iter().map(|m| m.id).collect();
        ids.sort();
        ids
    }

    /// Transition ids in ascending order.
    pub fn transition_ids(&self) -> Vec<TransitionId> {
        let mut ids: Vec<_> = self.transitions.iter().map(|t| t.id).collect();
        ids.sort();
        ids
    }

    /// Value of a parameter fixed in the model, if any.
    pub fn param_value(&self, name: &str) -> Option<f64> {
        match self.var(name) {
            Some(Variable { kind: VarKind::Param, init: Init::Value(v), .. }) => Some(*v),
            _ => None,
        }
    }
}
