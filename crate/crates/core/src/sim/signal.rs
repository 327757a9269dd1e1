use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalKind {
    Constant {
        value: f64,
    },
    /// `v0` before `t0`, `v1` from `t0` on.
    Step {
        t0: f64,
        v0: f64,
        v1: f64,
    },
    Ramp {
        v0: f64,
        slope: f64,
    },
    /// `hi` during the first `duty` fraction of each period, `lo` otherwise.
    Pulse {
        period: f64,
        duty: f64,
        lo: f64,
        hi: f64,
    },
    Sinusoid {
        amplitude: f64,
        /// In Hz.
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Piecewise constant with a fresh uniform value in `[lo, hi]` every
    /// `dwell` seconds. The value of window `k` depends only on
    /// `(seed, k)`. Without `dwell` the window is a tenth of the horizon;
    /// without `seed` one is derived from the run seed and the variable.
    /// `search: false` keeps the falsifier from optimising this signal.
    Random {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dwell: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "yes", skip_serializing_if = "is_true")]
        search: bool,
    },
    /// Window `k` takes `values[k]`; the last value is held afterwards.
    Piecewise {
        dwell: f64,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSignal {
    pub var: String,
    #[serde(flatten)]
    pub kind: SignalKind,
}

impl InputSignal {
    pub fn new(var: &str, kind: SignalKind) -> Self {
        Self { var: var.to_string(), kind }
    }

    pub fn constant(var: &str, value: f64) -> Self {
        Self::new(var, SignalKind::Constant { value })
    }

    /// Fills in the defaults of a `Random` signal for a run.
    pub fn resolved(&self, horizon: f64, run_seed: u64) -> Self {
        let mut out = self.clone();
        if let SignalKind::Random { dwell, seed, .. } = &mut out.kind {
            dwell.get_or_insert(horizon / 10.0);
            seed.get_or_insert_with(|| derive_seed(run_seed, &self.var));
        }
        out
    }

    /// Value at time `t`. A `Random` signal must be [resolved](Self::resolved)
    /// first; otherwise it uses a single window and seed 0.
    pub fn sample(&self, t: f64) -> f64 {
        match &self.kind {
            SignalKind::Constant { value } => *value,
            SignalKind::Step { t0, v0, v1 } => {
                if t < *t0 {
                    *v0
                } else {
                    *v1
                }
            }
            SignalKind::Ramp { v0, slope } => v0 + slope * t,
            SignalKind::Pulse { period, duty, lo, hi } => {
                if t.rem_euclid(*period) < duty * period {
                    *hi
                } else {
                    *lo
                }
            }
            SignalKind::Sinusoid { amplitude, frequency, phase, offset } => {
                offset + amplitude * (std::f64::consts::TAU * frequency * t + phase).sin()
            }
            SignalKind::Random { lo, hi, dwell, seed, .. } => {
                let window = window_of(t, dwell.unwrap_or(f64::INFINITY));
                random_value(seed.unwrap_or(0), window, *lo, *hi)
            }
            SignalKind::Piecewise { dwell, values } => {
                let k = window_of(t, *dwell) as usize;
                values.get(k).or(values.last()).copied().unwrap_or(0.0)
            }
        }
    }
}

fn window_of(t: f64, dwell: f64) -> u64 {
    if dwell.is_finite() && dwell > 0.0 {
        (t / dwell).floor().max(0.0) as u64
    } else {
        0
    }
}

/// Uniform value for window `k` of a random signal keyed by `seed`.
pub(crate) fn random_value(seed: u64, window: u64, lo: f64, hi: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(window);
    lo + (hi - lo) * rng.random::<f64>()
}

/// Stable per-variable seed (FNV-1a over the name, mixed with the run seed).
pub(crate) fn derive_seed(run_seed: u64, salt: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in salt.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = run_seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A signal plus a one-window cache, so piecewise signals draw each window
/// once per run.
pub(crate) struct Sampler<'a> {
    signal: &'a InputSignal,
    dwell: f64,
    cache: Cell<Option<(u64, f64)>>,
}

impl<'a> Sampler<'a> {
    pub fn new(signal: &'a InputSignal) -> Self {
        let dwell = match &signal.kind {
            SignalKind::Random { dwell, .. } => dwell.unwrap_or(f64::INFINITY),
            _ => f64::NAN,
        };
        Self { signal, dwell, cache: Cell::new(None) }
    }

    pub fn at(&self, t: f64) -> f64 {
        if self.dwell.is_nan() {
            return self.signal.sample(t);
        }
        let w = window_of(t, self.dwell);
        match self.cache.get() {
            Some((k, v)) if k == w => v,
            _ => {
                let v = self.signal.sample(t);
                self.cache.set(Some((w, v)));
                v
            }
        }
    }
}

/// Parses a JSON list of input signals.
pub fn parse_signals(text: &str) -> Result<Vec<InputSignal>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_switches_at_t0() {
        let s = InputSignal::new("u", SignalKind::Step { t0: 2.0, v0: 0.0, v1: 5.0 });
        assert_eq!(s.sample(1.9), 0.0);
        assert_eq!(s.sample(2.0), 5.0);
    }

    #[test]
    fn pulse_and_sinusoid() {
        let p = InputSignal::new("u", SignalKind::Pulse { period: 2.0, duty: 0.25, lo: -1.0, hi: 1.0 });
        assert_eq!(p.sample(0.4), 1.0);
        assert_eq!(p.sample(0.6), -1.0);
        assert_eq!(p.sample(2.1), 1.0);
        let s =
            InputSignal::new("u", SignalKind::Sinusoid { amplitude: 2.0, frequency: 0.25, phase: 0.0, offset: 1.0 });
        assert!((s.sample(1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn random_is_constant_per_window_and_keyed_by_seed() {
        let s = InputSignal::new(
            "u",
            SignalKind::Random { lo: -50.0, hi: 50.0, dwell: Some(5.0), seed: Some(7), search: true },
        );
        assert_eq!(s.sample(0.0), s.sample(4.999));
        assert_ne!(s.sample(0.0), s.sample(5.0));
        for k in 0..20 {
            let v = s.sample(k as f64 * 5.0 + 1.0);
            assert!((-50.0..=50.0).contains(&v));
        }
        let same = InputSignal::new(
            "u",
            SignalKind::Random { lo: -50.0, hi: 50.0, dwell: Some(5.0), seed: Some(7), search: true },
        );
        assert_eq!(s.sample(12.0), same.sample(12.0));
        let other = InputSignal::new(
            "u",
            SignalKind::Random { lo: -50.0, hi: 50.0, dwell: Some(5.0), seed: Some(8), search: true },
        );
        assert_ne!(s.sample(12.0), other.sample(12.0));
    }

    #[test]
    fn resolved_defaults_to_tenth_of_horizon() {
        let s = InputSignal::new("u", SignalKind::Random { lo: 0.0, hi: 1.0, dwell: None, seed: None, search: true });
        let r = s.resolved(50.0, 3);
        assert!(matches!(r.kind, SignalKind::Random { dwell: Some(d), seed: Some(_), .. } if d == 5.0));
        assert_eq!(r, s.resolved(50.0, 3));
        assert_ne!(r, s.resolved(50.0, 4));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"[{"var": "ngps", "kind": "random", "lo": -50, "hi": 50, "dwell": 5, "search": false},
                       {"var": "brk", "kind": "constant", "value": 1}]"#;
        let sigs = parse_signals(text).unwrap();
        assert_eq!(sigs.len(), 2);
        let back: Vec<InputSignal> = serde_json::from_str(&serde_json::to_string(&sigs).unwrap()).unwrap();
        assert_eq!(back, sigs);
    }
}
