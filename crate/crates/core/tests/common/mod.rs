#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;

use hyrepair::expr::parse;
use hyrepair::model::{HybridModel, Init, Mode, ModeId, Transition, TransitionId, VarKind, Variable};
use hyrepair::synth::{MinedParam, Monotonicity, Scenario, SynthBudget, SynthProblem};

/// `(name, invariant, flows)`.
pub type ModeSpec<'a> = (&'a str, &'a str, &'a [(&'a str, &'a str)]);
/// `(source, destination, guard, resets)`.
pub type TransitionSpec<'a> = (u32, u32, &'a str, &'a [(&'a str, &'a str)]);

/// Builds a small model from `(name, kind, init)` variables, `(name, invariant, flows)`
/// modes and `(src, dst, guard, resets)` transitions in priority order.
pub fn model(vars: &[(&str, VarKind, Init)], modes: &[ModeSpec], transitions: &[TransitionSpec]) -> HybridModel {
    let mut m = HybridModel::new("fixture");
    for (n, k, i) in vars {
        m.variables.push(Variable::new(n, *k, *i));
    }
    for (i, (name, inv, flow)) in modes.iter().enumerate() {
        m.modes.push(Mode {
            id: ModeId(i as u32),
            name: name.to_string(),
            invariant: parse(inv).unwrap(),
            flow: flow.iter().map(|(k, e)| (k.to_string(), parse(e).unwrap())).collect(),
            copy_of: None,
        });
    }
    let mut prio: BTreeMap<u32, u32> = BTreeMap::new();
    for (i, (s, d, g, r)) in transitions.iter().enumerate() {
        let p = prio.entry(*s).or_insert(0);
        *p += 1;
        m.transitions.push(Transition {
            id: TransitionId(i as u32),
            source: ModeId(*s),
            destination: ModeId(*d),
            guard: parse(g).unwrap(),
            reset: r.iter().map(|(k, e)| (k.to_string(), parse(e).unwrap())).collect(),
            priority: *p,
        });
    }
    m
}

pub fn assign(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Transformation scripts that must be rejected, with what is wrong with each.
pub const MALFORMED: &[(&str, &str)] = &[
    ("unterminated string", "model.addParam(\"theta)\n"),
    ("unknown method", "model.addParameter(\"theta\")\n"),
    ("wrong arity", "formode m = model.Mode {\n  m.replace(m.flow)\n}\n"),
    ("undeclared replacement name", "formode m = model.Mode {\n  m.replace(m.flow, \"ngps\", \"gamma*ngps\")\n}\n"),
    ("replace unknown variable", "formode m = model.Mode {\n  m.replace(m.flow, \"gps\", \"1\")\n}\n"),
    ("missing brace", "formode m = model.Mode {\n  c = model.addMode(m)\n"),
    ("unknown name", "x = m_copy.flow\n"),
    ("unknown field", "formode m = model.Mode {\n  x = m.guard\n}\n"),
    ("no copy", "formode m = model.Mode {\n  c = model.getCopyMode(m)\n}\n"),
    ("duplicate parameter", "model.addParam(\"theta\")\nmodel.addParam(\"theta\")\n"),
    ("bad guard text", "formode m = model.Mode {\n  model.addTransition(m, m, \"ngps >\")\n}\n"),
    ("numeric guard", "formode m = model.Mode {\n  model.addTransition(m, m, \"ngps + 1\")\n}\n"),
    ("edit a snapshot", "c = model.copyModel()\nc.addParam(\"theta\")\n"),
    ("loop over wrong collection", "formode m = model.Trans {\n}\n"),
    ("flow for a parameter", "formode m = model.Mode {\n  m.addFlow(\"v_l_dot = 1\")\n}\n"),
    (
        "bad connective",
        "model.addLocalVar(\"c\")\nfortran t = model.Trans {\n  t.addGuardLabel(\"xor\", \"c > 1\")\n}\n",
    ),
    ("reset of an input", "fortran t = model.Trans {\n  t.addResetLabel(\"ngps = 0\")\n}\n"),
    ("dangling reference", "x = a.b.c.d\n"),
    ("call without receiver", "addParam(\"theta\")\n"),
    (
        "partial success then failure",
        "model.addParam(\"theta\")\nformode m = model.Mode {\n  c = model.addMode(m)\n}\nmodel.addParam(\"theta\")\n",
    ),
];

/// `x' = theta * x` from `x = 1`.
pub fn growth() -> HybridModel {
    model(
        &[("x", VarKind::State, Init::Value(1.0)), ("theta", VarKind::Param, Init::Unset)],
        &[("run", "true", &[("x", "theta * x")])],
        &[],
    )
}

/// `x` grows at unit rate from somewhere in `[0, 0.5]` and freezes once it
/// exceeds `theta`, so `G[0,2](x < bound)` fails exactly when `theta >= bound`.
pub fn threshold() -> HybridModel {
    model(
        &[("x", VarKind::State, Init::Interval(0.0, 0.5)), ("theta", VarKind::Param, Init::Unset)],
        &[("grow", "true", &[("x", "1")]), ("hold", "true", &[("x", "0")])],
        &[(0, 1, "x > theta", &[])],
    )
}

pub fn threshold_problem(bound: f64, lo: f64, hi: f64, seed: u64) -> SynthProblem {
    let spec = hyrepair::stl::parse(&format!("G[0,2] (x < {bound})")).unwrap();
    SynthProblem {
        scenario: Scenario::new(threshold(), spec, vec![], 2.0, 1e-3),
        mined: vec![MinedParam { name: "theta".into(), lo, hi, monotonicity: Monotonicity::Decreasing }],
        budget: SynthBudget { validation: 50, ..SynthBudget::default() },
        seed,
    }
}
