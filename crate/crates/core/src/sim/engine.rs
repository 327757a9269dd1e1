use std::collections::BTreeMap;

use thiserror::Error;

use super::signal::{InputSignal, Sampler};
use super::trace::Trace;
use super::Assignment;
use crate::expr::{CompileError, CompiledExpr, Expr};
use crate::model::{validate, HybridModel, Init, ModeId, VarKind};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<S> {
    /// Simulated duration `T`.
    pub horizon: S,
    /// Integration step `h`.
    pub step: S,
    /// Resolution of guard-crossing localisation.
    pub event_tol: S,
    /// Most jumps allowed at a single instant before giving up.
    pub max_jumps: usize,
    /// Seeds random input signals that do not carry their own seed.
    pub seed: u64,
}

impl<S: Scalar> SimConfig<S> {
    pub fn with_horizon(horizon: f64) -> Self {
        Self { horizon: S::lit(horizon), ..Self::default() }
    }

    pub fn step(mut self, h: f64) -> Self {
        self.step = S::lit(h);
        self
    }
}

impl<S: Scalar> Default for SimConfig<S> {
    fn default() -> Self {
        Self { horizon: S::lit(10.0), step: S::lit(1e-3), event_tol: S::lit(1e-6), max_jumps: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("model is not valid: {0}")]
    InvalidModel(String),
    #[error("parameter '{0}' has no value")]
    UnboundParam(String),
    #[error("input '{0}' has no signal")]
    UnboundInput(String),
    #[error("signal given for '{0}', which is not an input of the model")]
    UnknownInput(String),
    #[error("no initial value for '{0}'")]
    MissingInit(String),
    #[error("initial value {value} of '{var}' is outside its declared range")]
    InitOutOfRange { var: String, value: f64 },
    #[error("more than {jumps} jumps at t = {t}; the model looks Zeno")]
    ZenoDetected { t: f64, jumps: usize },
    #[error("invariant of mode '{mode}' violated at t = {t} with no enabled transition")]
    InvariantViolated { t: f64, mode: String },
    #[error("'{var}' became non-finite at t = {t}")]
    NumericOverflow { t: f64, var: String },
    #[error("bad simulation settings: {0}")]
    BadConfig(String),
}

struct CTransition<S> {
    guard: CompiledExpr<S>,
    resets: Vec<(usize, CompiledExpr<S>)>,
    dest: usize,
}

struct CMode<S> {
    id: ModeId,
    name: String,
    /// One entry per integrated variable; `None` means zero derivative.
    flow: Vec<Option<CompiledExpr<S>>>,
    invariant: Option<CompiledExpr<S>>,
    transitions: Vec<CTransition<S>>,
}

/// A model compiled for repeated simulation. Expressions are resolved to
/// slots of an environment laid out as `[states.., inputs.., params..]`.
pub struct Simulator<S> {
    model: HybridModel,
    states: Vec<String>,
    inputs: Vec<String>,
    params: Vec<String>,
    modes: Vec<CMode<S>>,
    initial: usize,
}

struct Scratch<S> {
    env: Vec<S>,
    k: [Vec<S>; 4],
    xm: Vec<S>,
    reset: Vec<S>,
}

impl<S: Scalar> Simulator<S> {
    pub fn new(model: &HybridModel) -> Result<Self, SimError> {
        if let Some(d) = validate(model).into_iter().next() {
            return Err(SimError::InvalidModel(d.to_string()));
        }
        let names = |pred: fn(VarKind) -> bool| -> Vec<String> {
            model.variables.iter().filter(|v| pred(v.kind)).map(|v| v.name.clone()).collect()
        };
        let states = names(VarKind::is_integrated);
        let inputs = names(|k| k == VarKind::Input);
        let params = names(|k| k == VarKind::Param);
        let slots: BTreeMap<&str, usize> =
            states.iter().chain(&inputs).chain(&params).enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let resolve = |n: &str| slots.get(n).copied();
        let compile = |e: &Expr| {
            CompiledExpr::compile(e, &resolve)
                .map_err(|CompileError::UnknownVariable(v)| SimError::InvalidModel(format!("unknown variable '{v}'")))
        };
        let index: BTreeMap<ModeId, usize> = model.modes.iter().enumerate().map(|(i, m)| (m.id, i)).collect();
        let mut modes = Vec::new();
        for m in &model.modes {
            let flow = states.iter().map(|s| m.flow.get(s).map(compile).transpose()).collect::<Result<_, _>>()?;
            let invariant = match &m.invariant {
                Expr::Bool(true) => None,
                e => Some(compile(e)?),
            };
            let mut transitions = Vec::new();
            for t in model.outgoing(m.id) {
                let resets = t
                    .reset
                    .iter()
                    .map(|(v, e)| Ok((slots[v.as_str()], compile(e)?)))
                    .collect::<Result<_, SimError>>()?;
                transitions.push(CTransition { guard: compile(&t.guard)?, resets, dest: index[&t.destination] });
            }
            modes.push(CMode { id: m.id, name: m.name.clone(), flow, invariant, transitions });
        }
        Ok(Self { initial: index[&model.initial_mode], model: model.clone(), states, inputs, params, modes })
    }

    pub fn model(&self) -> &HybridModel {
        &self.model
    }

    /// Names of the trace columns: integrated variables, then inputs.
    pub fn column_names(&self) -> Vec<String> {
        self.states.iter().chain(&self.inputs).cloned().collect()
    }

    pub fn mode_names(&self) -> Vec<(ModeId, String)> {
        self.modes.iter().map(|m| (m.id, m.name.clone())).collect()
    }

    fn check_init(&self, init: &Assignment) -> Result<Vec<S>, SimError> {
        let mut x = Vec::with_capacity(self.states.len());
        for name in &self.states {
            let var = self.model.var(name).expect("compiled from the model");
            let value = match (init.get(name), var.init) {
                (Some(v), _) => *v,
                (None, Init::Value(v)) => v,
                (None, _) => return Err(SimError::MissingInit(name.clone())),
            };
            if var.kind == VarKind::State {
                if let Init::Interval(lo, hi) = var.init {
                    let base = match &var.init_relative_to {
                        Some(b) => init.get(b).copied().ok_or_else(|| SimError::MissingInit(b.clone()))?,
                        None => 0.0,
                    };
                    let tol = 1e-9 * (1.0 + base.abs() + lo.abs().max(hi.abs()));
                    if !(value - base >= lo - tol && value - base <= hi + tol) {
                        return Err(SimError::InitOutOfRange { var: name.clone(), value });
                    }
                }
            }
            x.push(S::lit(value));
        }
        Ok(x)
    }

    /// Simulates one run. `params` overrides parameter values fixed in the
    /// model; parameters without either are an error.
    pub fn run(
        &self,
        inputs: &[InputSignal],
        init: &Assignment,
        params: &Assignment,
        cfg: &SimConfig<S>,
    ) -> Result<Trace<S>, SimError> {
        if !(cfg.step > S::zero() && cfg.horizon >= S::zero() && cfg.event_tol > S::zero()) {
            return Err(SimError::BadConfig("step and event tolerance must be positive, horizon non-negative".into()));
        }
        let horizon = cfg.horizon.as_f64();
        for s in inputs {
            if !self.inputs.contains(&s.var) {
                return Err(SimError::UnknownInput(s.var.clone()));
            }
        }
        let resolved: Vec<InputSignal> = self
            .inputs
            .iter()
            .map(|name| {
                inputs
                    .iter()
                    .find(|s| &s.var == name)
                    .map(|s| s.resolved(horizon, cfg.seed))
                    .ok_or_else(|| SimError::UnboundInput(name.clone()))
            })
            .collect::<Result<_, _>>()?;
        let samplers: Vec<Sampler> = resolved.iter().map(Sampler::new).collect();
        let n = self.states.len();
        let mut env = self.check_init(init)?;
        env.resize(n + self.inputs.len(), S::zero());
        for p in &self.params {
            let v = params
                .get(p)
                .copied()
                .or_else(|| self.model.param_value(p))
                .ok_or_else(|| SimError::UnboundParam(p.clone()))?;
            env.push(S::lit(v));
        }
        let mut sc =
            Scratch { k: std::array::from_fn(|_| vec![S::zero(); n]), xm: vec![S::zero(); n], reset: Vec::new(), env };
        let mut x: Vec<S> = sc.env[..n].to_vec();
        let mut x1 = vec![S::zero(); n];

        let mut trace = Trace::new(self.column_names(), n);
        let steps = (cfg.horizon / cfg.step - S::lit(1e-9)).ceil().to_usize().unwrap_or(0);
        let max_events = cfg.max_jumps.max(1) * 10;
        let mut mode = self.initial;
        let mut t = S::zero();

        self.set_inputs(&mut sc.env, &samplers, t);
        self.discrete(&mut mode, &mut x, &mut sc, cfg, t)?;
        self.record(&mut trace, mode, &x, &sc.env, t)?;

        let mut k = 0;
        let mut events = 0;
        while k < steps {
            let t_next = if k + 1 == steps { cfg.horizon } else { S::lit((k + 1) as f64) * cfg.step };
            let dt = t_next - t;
            self.rk4(mode, &x, dt, &mut x1, &mut sc);
            if !self.modes[mode].transitions.is_empty() && self.any_guard(mode, &x1, &mut sc.env) {
                let (mut lo, mut hi) = (S::zero(), dt);
                while hi - lo > cfg.event_tol {
                    let mid = (lo + hi) / S::lit(2.0);
                    let mut xm = std::mem::take(&mut sc.xm);
                    self.rk4(mode, &x, mid, &mut xm, &mut sc);
                    let fired = self.any_guard(mode, &xm, &mut sc.env);
                    sc.xm = xm;
                    if fired {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if hi < dt {
                    let mut xe = std::mem::take(&mut sc.xm);
                    self.rk4(mode, &x, hi, &mut xe, &mut sc);
                    x.copy_from_slice(&xe);
                    sc.xm = xe;
                    t += hi;
                    events += 1;
                    if events > max_events {
                        return Err(SimError::ZenoDetected { t: t.as_f64(), jumps: events });
                    }
                    self.set_inputs(&mut sc.env, &samplers, t);
                    self.discrete(&mut mode, &mut x, &mut sc, cfg, t)?;
                    self.record(&mut trace, mode, &x, &sc.env, t)?;
                    continue;
                }
            }
            x.copy_from_slice(&x1);
            t = t_next;
            k += 1;
            events = 0;
            self.set_inputs(&mut sc.env, &samplers, t);
            self.discrete(&mut mode, &mut x, &mut sc, cfg, t)?;
            self.record(&mut trace, mode, &x, &sc.env, t)?;
        }
        Ok(trace)
    }

    fn set_inputs(&self, env: &mut [S], samplers: &[Sampler], t: S) {
        let n = self.states.len();
        let t = t.as_f64();
        for (i, s) in samplers.iter().enumerate() {
            env[n + i] = S::lit(s.at(t));
        }
    }

    fn derivative(&self, mode: usize, env: &[S], out: &mut [S]) {
        for (o, f) in out.iter_mut().zip(&self.modes[mode].flow) {
            *o = f.as_ref().map_or_else(S::zero, |f| f.eval(env));
        }
    }

    /// One classic RK4 step of length `h` from `x`, inputs held at their
    /// current values in the environment.
    fn rk4(&self, mode: usize, x: &[S], h: S, out: &mut [S], sc: &mut Scratch<S>) {
        let n = x.len();
        let half = h / S::lit(2.0);
        let [k1, k2, k3, k4] = &mut sc.k;
        sc.env[..n].copy_from_slice(x);
        self.derivative(mode, &sc.env, k1);
        for i in 0..n {
            sc.env[i] = x[i] + half * k1[i];
        }
        self.derivative(mode, &sc.env, k2);
        for i in 0..n {
            sc.env[i] = x[i] + half * k2[i];
        }
        self.derivative(mode, &sc.env, k3);
        for i in 0..n {
            sc.env[i] = x[i] + h * k3[i];
        }
        self.derivative(mode, &sc.env, k4);
        let sixth = h / S::lit(6.0);
        let two = S::lit(2.0);
        for i in 0..n {
            out[i] = x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
    }

    fn any_guard(&self, mode: usize, x: &[S], env: &mut [S]) -> bool {
        env[..x.len()].copy_from_slice(x);
        self.modes[mode].transitions.iter().any(|t| t.guard.eval_bool(env))
    }

    /// Fires enabled transitions, highest priority first, until none is
    /// enabled.
    fn discrete(
        &self,
        mode: &mut usize,
        x: &mut [S],
        sc: &mut Scratch<S>,
        cfg: &SimConfig<S>,
        t: S,
    ) -> Result<(), SimError> {
        let n = x.len();
        let mut jumps = 0;
        loop {
            sc.env[..n].copy_from_slice(x);
            let Some(tr) = self.modes[*mode].transitions.iter().find(|tr| tr.guard.eval_bool(&sc.env)) else {
                return Ok(());
            };
            jumps += 1;
            if jumps > cfg.max_jumps {
                return Err(SimError::ZenoDetected { t: t.as_f64(), jumps: cfg.max_jumps });
            }
            sc.reset.clear();
            sc.reset.extend(tr.resets.iter().map(|(_, e)| e.eval(&sc.env)));
            for ((slot, _), v) in tr.resets.iter().zip(&sc.reset) {
                x[*slot] = *v;
            }
            *mode = tr.dest;
        }
    }

    fn record(&self, trace: &mut Trace<S>, mode: usize, x: &[S], env: &[S], t: S) -> Result<(), SimError> {
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(SimError::NumericOverflow { t: t.as_f64(), var: self.states[i].clone() });
        }
        let m = &self.modes[mode];
        if let Some(inv) = &m.invariant {
            // The environment still holds the post-jump state from `discrete`.
            if !inv.eval_bool(env) {
                return Err(SimError::InvariantViolated { t: t.as_f64(), mode: m.name.clone() });
            }
        }
        let n = x.len();
        trace.push(t, m.id, x.iter().copied().chain(env[n..n + self.inputs.len()].iter().copied()));
        Ok(())
    }
}
