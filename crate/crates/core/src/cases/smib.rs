use std::collections::BTreeMap;

use super::e;
use crate::model::{HybridModel, Init, Mode, ModeId, Transition, TransitionId, VarKind, Variable};

/// Swing equation shared by every SMIB mode. `load` is the breaker status.
const SWING: &str = "(P_M - Pe_max * sin(delta) - D * omega - load * P_L) / M";

fn plant(name: &str) -> HybridModel {
    let mut m = HybridModel::new(name);
    let mut push = |name: &str, kind, init| m.variables.push(Variable::new(name, kind, init));
    push("delta", VarKind::State, Init::Interval(0.01, 1.1198));
    push("omega", VarKind::State, Init::Interval(0.0, 1.0));
    push("load", VarKind::Local, Init::Value(1.0));
    push("M", VarKind::Param, Init::Value(0.02));
    push("D", VarKind::Param, Init::Value(0.14));
    push("P_M", VarKind::Param, Init::Value(1.0));
    push("P_L", VarKind::Param, Init::Value(0.35));
    push("Pe_max", VarKind::Param, Init::Value(1.2));
    m
}

fn flows(extra: &[(&str, &str)]) -> BTreeMap<String, crate::expr::Expr> {
    [("delta", "omega"), ("omega", SWING)].iter().chain(extra).map(|(k, s)| (k.to_string(), e(s))).collect()
}

fn transition(id: u32, src: u32, dst: u32, guard: &str, reset: &[(&str, &str)], priority: u32) -> Transition {
    Transition {
        id: TransitionId(id),
        source: ModeId(src),
        destination: ModeId(dst),
        guard: e(guard),
        reset: reset.iter().map(|(k, s)| (k.to_string(), e(s))).collect(),
        priority,
    }
}

/// The unattacked plant. The breaker follows the command input `brk`
/// (closed when `brk >= 0.5`).
pub fn smib() -> HybridModel {
    let mut m = plant("smib");
    m.variables.push(Variable::new("brk", VarKind::Input, Init::Unset));
    for (id, name) in [(0, "connected"), (1, "disconnected")] {
        m.modes.push(Mode { id: ModeId(id), name: name.into(), invariant: e("true"), flow: flows(&[]), copy_of: None });
    }
    m.transitions.push(transition(0, 0, 1, "brk < 0.5", &[("load", "0")], 1));
    m.transitions.push(transition(1, 1, 0, "brk >= 0.5", &[("load", "1")], 1));
    m.initial_mode = ModeId(0);
    m
}

/// The plant with the breaker driven by a switching attacker.
///
/// The attacker opens the breaker while `delta + omega` is above 0.2, closes
/// it below, and at `tau >= 2.5` opens it for good. The product of the plant
/// and the attacker is flattened into three reachable modes: the combination
/// "connected and locked" cannot be reached and is left out.
pub fn smib_attacked() -> HybridModel {
    let mut m = plant("smib_attacked");
    m.variables.push(Variable::new("tau", VarKind::Local, Init::Value(0.0)));
    for (id, name) in [(0, "conn_slide"), (1, "disc_slide"), (2, "disc_locked")] {
        m.modes.push(Mode {
            id: ModeId(id),
            name: name.into(),
            invariant: e("true"),
            flow: flows(&[("tau", "1")]),
            copy_of: None,
        });
    }
    m.transitions.push(transition(0, 0, 2, "tau >= 2.5", &[("load", "0")], 1));
    m.transitions.push(transition(1, 0, 1, "delta + omega > 0.2", &[("load", "0")], 2));
    m.transitions.push(transition(2, 1, 2, "tau >= 2.5", &[], 1));
    m.transitions.push(transition(3, 1, 0, "delta + omega < 0.2", &[("load", "1")], 2));
    m.initial_mode = ModeId(0);
    m
}
