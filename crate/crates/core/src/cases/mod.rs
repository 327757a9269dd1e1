//! Bundled case studies: adaptive cruise control (ACC) and a single-machine
//! infinite-bus power system (SMIB).
//!
//! Both plants use stand-in dynamics tuned to show the qualitative behaviour
//! the repair patterns address. The ACC is safe under nominal sensor noise and
//! unsafe under a large GPS offset. The SMIB stays in its stability box while
//! the breaker is honest and leaves it when an attacker toggles the load
//! around the surface `delta + omega = 0.2` and finally drops it at `t = 2.5`.
//!
//! The JSON, HATL, STL and signal files under `assets/` are the same objects
//! in file form. `tests/cases.rs` checks they stay in sync with the builders.

mod acc;
mod smib;

pub use acc::acc;
pub use smib::{smib, smib_attacked};

use crate::expr::{self, Expr};
use crate::model::{HybridModel, VarKind};
use crate::synth::Scenario;
use crate::{sim, stl};

pub const PATTERN1: &str = include_str!("../../assets/pattern1.hatl");
pub const PATTERN2: &str = include_str!("../../assets/pattern2.hatl");
pub const PATTERN3: &str = include_str!("../../assets/pattern3.hatl");
pub const DWELL: &str = include_str!("../../assets/dwell.hatl");

pub const ACC_SPEC: &str = include_str!("../../assets/acc.stl");
pub const SMIB_SPEC: &str = include_str!("../../assets/smib.stl");

pub const ACC_NOMINAL_SIGNALS: &str = include_str!("../../assets/acc_nominal.signals.json");
pub const ACC_ATTACK_SIGNALS: &str = include_str!("../../assets/acc_attack.signals.json");
pub const SMIB_SIGNALS: &str = include_str!("../../assets/smib.signals.json");

/// Simulation horizon of the ACC scenario in seconds.
pub const ACC_HORIZON: f64 = 50.0;
/// Simulation horizon of the SMIB scenario in seconds.
pub const SMIB_HORIZON: f64 = 10.0;
/// Integration step used for the ACC studies. The closed loop is slow enough
/// that the default 1 ms step buys no accuracy.
pub const ACC_STEP: f64 = 0.01;
/// Integration step used for the SMIB studies.
pub const SMIB_STEP: f64 = 0.002;

fn e(src: &str) -> Expr {
    expr::parse(src).unwrap_or_else(|err| panic!("bundled expression '{src}': {err}"))
}

fn scenario(model: HybridModel, spec: &str, signals: &str, horizon: f64, step: f64) -> Scenario {
    let spec = stl::parse(spec).expect("bundled spec parses");
    let inputs: Vec<String> = model.vars_of(VarKind::Input).map(|v| v.name.clone()).collect();
    let signals = sim::parse_signals(signals)
        .expect("bundled signals parse")
        .into_iter()
        .filter(|s| inputs.contains(&s.var))
        .collect();
    Scenario::new(model, spec, signals, horizon, step)
}

/// The ACC requirement on `model` (the original or a repaired one) under
/// nominal sensor noise, or under the GPS spoofing attack.
pub fn acc_scenario(model: HybridModel, attack: bool) -> Scenario {
    let signals = if attack { ACC_ATTACK_SIGNALS } else { ACC_NOMINAL_SIGNALS };
    scenario(model, ACC_SPEC, signals, ACC_HORIZON, ACC_STEP)
}

/// The SMIB stability requirement on `model`. Breaker signals are only
/// attached when the model has a breaker input.
pub fn smib_scenario(model: HybridModel) -> Scenario {
    scenario(model, SMIB_SPEC, SMIB_SIGNALS, SMIB_HORIZON, SMIB_STEP)
}

/// Every bundled file, by file name, as written by `hyrepair export-cases`.
pub fn files() -> Vec<(&'static str, String)> {
    let mut out = vec![
        ("acc.model.json", acc().to_json()),
        ("smib.model.json", smib().to_json()),
        ("smib_attacked.model.json", smib_attacked().to_json()),
    ];
    let fixed = [
        ("pattern1.hatl", PATTERN1),
        ("pattern2.hatl", PATTERN2),
        ("pattern3.hatl", PATTERN3),
        ("dwell.hatl", DWELL),
        ("acc.stl", ACC_SPEC),
        ("smib.stl", SMIB_SPEC),
        ("acc_nominal.signals.json", ACC_NOMINAL_SIGNALS),
        ("acc_attack.signals.json", ACC_ATTACK_SIGNALS),
        ("smib.signals.json", SMIB_SIGNALS),
        ("reproduce_acc.sh", include_str!("../../assets/reproduce_acc.sh")),
        ("reproduce_smib.sh", include_str!("../../assets/reproduce_smib.sh")),
    ];
    out.extend(fixed.iter().map(|(n, s)| (*n, s.to_string())));
    out
}
