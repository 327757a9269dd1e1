use super::{Scenario, SynthError};
use crate::model::{Init, VarKind};
use crate::sim::{Assignment, InitBox, InputSignal, SignalKind};

#[derive(Debug, Clone, PartialEq)]
pub enum DimKind {
    Param(String),
    /// Index into the model's [`InitBox`].
    Init(usize),
    /// One dwell window of a searchable random input.
    Window {
        signal: usize,
        window: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dim {
    pub kind: DimKind,
    pub lo: f64,
    pub hi: f64,
}

/// Everything the falsifier may vary: mined parameters, free initial
/// states and the per-window values of random inputs marked searchable.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub dims: Vec<Dim>,
    init: InitBox,
    /// `(signal index, dwell, window count)` of every searchable input.
    windows: Vec<(usize, f64, usize)>,
}

/// A concrete falsification candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub params: Assignment,
    pub init: Assignment,
    pub signals: Vec<InputSignal>,
}

impl SearchSpace {
    /// Builds the space for `scenario` with the given parameter ranges. Every
    /// other parameter must have a value in the scenario or the model.
    pub fn new(scenario: &Scenario, params: &[(String, f64, f64)]) -> Result<Self, SynthError> {
        let model = &scenario.model;
        let mut dims = Vec::new();
        for (name, lo, hi) in params {
            if !matches!(model.var(name), Some(v) if v.kind == VarKind::Param) {
                return Err(SynthError::UnknownParam(name.clone()));
            }
            if lo > hi || lo.is_nan() || hi.is_nan() {
                return Err(SynthError::BadRange { name: name.clone(), lo: *lo, hi: *hi });
            }
            dims.push(Dim { kind: DimKind::Param(name.clone()), lo: *lo, hi: *hi });
        }
        for v in model.vars_of(VarKind::Param) {
            let bound = scenario.params.contains_key(&v.name) || matches!(v.init, Init::Value(_));
            if !bound && !params.iter().any(|(n, ..)| n == &v.name) {
                return Err(SynthError::UnboundParam(v.name.clone()));
            }
        }
        let init = InitBox::of(model);
        for (i, d) in init.dims.iter().enumerate() {
            if d.lo < d.hi {
                dims.push(Dim { kind: DimKind::Init(i), lo: d.lo, hi: d.hi });
            }
        }
        let mut windows = Vec::new();
        for (i, s) in scenario.signals.iter().enumerate() {
            if let SignalKind::Random { lo, hi, dwell, search: true, .. } = s.kind {
                let dwell = dwell.unwrap_or(scenario.horizon / 10.0);
                let count = ((scenario.horizon / dwell - 1e-9).ceil() as usize).max(1);
                for w in 0..count {
                    dims.push(Dim { kind: DimKind::Window { signal: i, window: w }, lo, hi });
                }
                windows.push((i, dwell, count));
            }
        }
        Ok(Self { dims, init, windows })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Maps a point of the unit cube to a candidate. Searchable random
    /// inputs become piecewise-constant signals with the chosen values.
    pub fn point(&self, scenario: &Scenario, unit: &[f64]) -> Point {
        let mut params = scenario.params.clone();
        let mut coords: Vec<f64> = self.init.dims.iter().map(|d| d.lo).collect();
        let mut signals = scenario.signals.clone();
        let mut values: Vec<Vec<f64>> = self.windows.iter().map(|&(_, _, n)| vec![0.0; n]).collect();
        for (d, &u) in self.dims.iter().zip(unit) {
            let x = d.lo + (d.hi - d.lo) * u;
            match &d.kind {
                DimKind::Param(name) => {
                    params.insert(name.clone(), x);
                }
                DimKind::Init(i) => coords[*i] = x,
                DimKind::Window { signal, window } => {
                    let slot = self.windows.iter().position(|w| w.0 == *signal).expect("window belongs to a signal");
                    values[slot][*window] = x;
                }
            }
        }
        for ((i, dwell, _), values) in self.windows.iter().zip(values) {
            signals[*i].kind = SignalKind::Piecewise { dwell: *dwell, values };
        }
        Point { params, init: self.init.resolve(&coords), signals }
    }
}
