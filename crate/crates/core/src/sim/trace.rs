use std::fmt::Write;

use serde_json::json;

use crate::model::ModeId;
use crate::Scalar;

/// Sampled run of a model. Columns hold the state and local variables
/// (in declaration order) followed by the inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<S> {
    pub times: Vec<S>,
    pub modes: Vec<ModeId>,
    pub names: Vec<String>,
    /// Number of leading columns that are state or local variables.
    pub n_states: usize,
    pub columns: Vec<Vec<S>>,
}

impl<S: Scalar> Trace<S> {
    pub fn new(names: Vec<String>, n_states: usize) -> Self {
        let columns = vec![Vec::new(); names.len()];
        Self { times: Vec::new(), modes: Vec::new(), names, n_states, columns }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> S {
        self.times.last().copied().unwrap_or_else(S::zero)
    }

    pub fn column(&self, name: &str) -> Option<&[S]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn push(&mut self, t: S, mode: ModeId, values: impl IntoIterator<Item = S>) {
        self.times.push(t);
        self.modes.push(mode);
        let mut n = 0;
        for (col, v) in self.columns.iter_mut().zip(values) {
            col.push(v);
            n += 1;
        }
        debug_assert_eq!(n, self.columns.len());
    }

    /// Number of mode changes along the trace.
    pub fn switches(&self) -> usize {
        self.modes.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// CSV with header `t,mode,<columns>` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mode");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{:.16e},{}", self.times[i].as_f64(), self.modes[i]);
            for c in &self.columns {
                let _ = write!(out, ",{:.16e}", c[i].as_f64());
            }
            out.push('\n');
        }
        out
    }

    /// Column-oriented JSON for plotting tools.
    pub fn to_plot_json(&self, mode_names: &[(ModeId, String)]) -> String {
        let series: serde_json::Map<_, _> = self
            .names
            .iter()
            .zip(&self.columns)
            .map(|(n, c)| (n.clone(), json!(c.iter().map(|v| v.as_f64()).collect::<Vec<_>>())))
            .collect();
        let names: serde_json::Map<_, _> = mode_names.iter().map(|(id, n)| (id.to_string(), json!(n))).collect();
        let doc = json!({
            "t": self.times.iter().map(|v| v.as_f64()).collect::<Vec<_>>(),
            "mode": self.modes.iter().map(|m| m.0).collect::<Vec<_>>(),
            "mode_names": names,
            "series": series,
        });
        let mut s = serde_json::to_string(&doc).expect("plot data serialises");
        s.push('\n');
        s
    }
}
