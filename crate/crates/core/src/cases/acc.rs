use std::collections::BTreeMap;

use super::e;
use crate::model::{HybridModel, Init, Mode, ModeId, Transition, TransitionId, VarKind, Variable};

/// Ego vehicle following a lead car at constant speed `v_l`.
///
/// States: gap `d`, ego speed `v`, and the filtered estimates `e_d`, `e_v`.
/// The distance estimate tracks the radar, the speed estimate averages GPS
/// and wheel encoder. In `speed_control` the car regulates towards 30 m/s;
/// once the estimated gap drops below `10 + 2 e_v` it switches to
/// `spacing_control`, which tracks the gap `2.5 e_v - 5`. Accelerations are
/// limited to `[-5, 3]` m/s^2.
pub fn acc() -> HybridModel {
    let mut m = HybridModel::new("acc");
    let mut push = |name: &str, kind, init| m.variables.push(Variable::new(name, kind, init));
    push("d", VarKind::State, Init::Interval(90.0, 100.0));
    push("v", VarKind::State, Init::Interval(25.0, 30.0));
    push("e_d", VarKind::State, Init::Interval(-10.0, 10.0));
    push("e_v", VarKind::State, Init::Interval(-5.0, 5.0));
    push("ngps", VarKind::Input, Init::Unset);
    push("nenc", VarKind::Input, Init::Unset);
    push("nrad", VarKind::Input, Init::Unset);
    push("v_l", VarKind::Param, Init::Value(20.0));
    m.var_mut("e_d").unwrap().init_relative_to = Some("d".into());
    m.var_mut("e_v").unwrap().init_relative_to = Some("v".into());

    let estimator = |accel: &str| -> BTreeMap<String, _> {
        [
            ("d", "v_l - v"),
            ("v", accel),
            ("e_d", "5 * (d + nrad - e_d)"),
            ("e_v", "5 * ((v + ngps + v + nenc) / 2 - e_v)"),
        ]
        .into_iter()
        .map(|(k, s)| (k.to_string(), e(s)))
        .collect()
    };
    m.modes.push(Mode {
        id: ModeId(0),
        name: "speed_control".into(),
        invariant: e("true"),
        flow: estimator("max(-5, min(3, 0.5 * (30 - e_v)))"),
        copy_of: None,
    });
    m.modes.push(Mode {
        id: ModeId(1),
        name: "spacing_control".into(),
        invariant: e("true"),
        flow: estimator("max(-5, min(3, e_d - (2.5 * e_v - 5)))"),
        copy_of: None,
    });
    m.transitions.push(Transition {
        id: TransitionId(0),
        source: ModeId(0),
        destination: ModeId(1),
        guard: e("e_d < 10 + 2 * e_v"),
        reset: BTreeMap::new(),
        priority: 1,
    });
    m.transitions.push(Transition {
        id: TransitionId(1),
        source: ModeId(1),
        destination: ModeId(0),
        guard: e("e_d >= 10 + 2 * e_v"),
        reset: BTreeMap::new(),
        priority: 1,
    });
    m.initial_mode = ModeId(0);
    m
}
