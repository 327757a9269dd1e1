use std::collections::VecDeque;

use super::ast::{margin, Formula};
use super::StlError;
use crate::expr::CompiledExpr;
use crate::sim::Trace;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robustness<S> {
    pub value: S,
    pub verdict: Verdict,
}

/// Robustness of `f` at time 0.
pub fn robustness<S: Scalar>(f: &Formula, tr: &Trace<S>) -> Result<Robustness<S>, StlError> {
    let sig = robustness_signal(f, tr)?;
    let value = sig[0];
    let verdict = if value > S::zero() { Verdict::Satisfied } else { Verdict::Violated };
    Ok(Robustness { value, verdict })
}

/// Robustness of `f` at every sample of the trace. Windows reaching past
/// the end of the trace are cut at the last sample.
pub fn robustness_signal<S: Scalar>(f: &Formula, tr: &Trace<S>) -> Result<Vec<S>, StlError> {
    if tr.is_empty() {
        return Err(StlError::EmptyTrace);
    }
    let available = tr.horizon().as_f64();
    let required = f.horizon();
    if required > available + 1e-9 * (1.0 + available) {
        return Err(StlError::HorizonTooShort { required, available });
    }
    eval(f, tr)
}

fn eval<S: Scalar>(f: &Formula, tr: &Trace<S>) -> Result<Vec<S>, StlError> {
    Ok(match f {
        Formula::Atom(cmp) => {
            let m = margin(cmp).expect("atoms are comparisons");
            let e = CompiledExpr::<S>::compile(&m, &|n| tr.names.iter().position(|c| c == n))
                .map_err(|crate::expr::CompileError::UnknownVariable(v)| StlError::UnknownSignal(v))?;
            let mut row = vec![S::zero(); tr.columns.len()];
            (0..tr.len())
                .map(|i| {
                    for (slot, col) in row.iter_mut().zip(&tr.columns) {
                        *slot = col[i];
                    }
                    e.eval(&row)
                })
                .collect()
        }
        Formula::Not(a) => eval(a, tr)?.into_iter().map(|v| -v).collect(),
        Formula::And(a, b) => zip(eval(a, tr)?, eval(b, tr)?, |x, y| x.min(y)),
        Formula::Or(a, b) => zip(eval(a, tr)?, eval(b, tr)?, |x, y| x.max(y)),
        Formula::Implies(a, b) => zip(eval(a, tr)?, eval(b, tr)?, |x, y| (-x).max(y)),
        Formula::Globally(a, b, c) => window_min(&tr.times, &eval(c, tr)?, *a, *b, c.horizon()),
        Formula::Eventually(a, b, c) => {
            let neg: Vec<S> = eval(c, tr)?.into_iter().map(|v| -v).collect();
            window_min(&tr.times, &neg, *a, *b, c.horizon()).into_iter().map(|v| -v).collect()
        }
    })
}

fn zip<S: Scalar>(a: Vec<S>, b: Vec<S>, op: impl Fn(S, S) -> S) -> Vec<S> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Linear interpolation of `r` at time `t` (clamped to the trace).
fn interp<S: Scalar>(times: &[S], r: &[S], t: S) -> S {
    let j = times.partition_point(|x| *x <= t);
    if j == 0 {
        return r[0];
    }
    let i = j - 1;
    if i + 1 >= times.len() || times[i] == t {
        return r[i];
    }
    let s = (t - times[i]) / (times[i + 1] - times[i]);
    r[i] + (r[i + 1] - r[i]) * s
}

/// For every sample time `t_k`, the minimum of `r` over
/// `[t_k + a, t_k + b]` cut to the trace, where samples strictly inside the
/// window are read directly and the two endpoints are interpolated. An
/// unbounded window ends where the child formula, of horizon `child`, can
/// last be evaluated.
fn window_min<S: Scalar>(times: &[S], r: &[S], a: f64, b: f64, child: f64) -> Vec<S> {
    let n = times.len();
    let end = times[n - 1];
    let (a_s, b_s) = (S::lit(a), S::lit(b));
    let last_start = end - S::lit(child);
    let mut out = Vec::with_capacity(n);
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for &t in times {
        let lo = (t + a_s).min(end);
        let hi = if b.is_finite() { (t + b_s).min(end) } else { last_start.max(lo) };
        while next < n && times[next] < hi {
            while dq.back().is_some_and(|&j| r[j] >= r[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&j| times[j] <= lo) {
            dq.pop_front();
        }
        let mut v = interp(times, r, lo).min(interp(times, r, hi));
        if let Some(&j) = dq.front() {
            v = v.min(r[j]);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeId;
    use crate::stl::parse;

    fn trace(times: &[f64], x: &[f64]) -> Trace<f64> {
        let mut tr = Trace::new(vec!["x".into()], 1);
        for (t, v) in times.iter().zip(x) {
            tr.push(*t, ModeId(0), [*v]);
        }
        tr
    }

    #[test]
    fn atom_margin_at_time_zero() {
        let tr = trace(&[0.0, 1.0], &[3.0, 1.0]);
        assert_eq!(robustness(&parse("x > 1").unwrap(), &tr).unwrap().value, 2.0);
        assert_eq!(robustness(&parse("x < 1").unwrap(), &tr).unwrap().value, -2.0);
        assert_eq!(robustness(&parse("x == 1").unwrap(), &tr).unwrap().value, -2.0);
    }

    #[test]
    fn globally_takes_the_minimum_with_interpolated_endpoints() {
        let tr = trace(&[0.0, 1.0, 2.0, 3.0], &[5.0, 1.0, 4.0, 0.0]);
        let r = robustness(&parse("G[0,3] x > 0").unwrap(), &tr).unwrap();
        assert_eq!((r.value, r.verdict), (0.0, Verdict::Violated));
        // Window [0.5, 1.5]: interpolated endpoints 3 and 2.5, interior sample 1.
        assert_eq!(robustness(&parse("G[0.5,1.5] x > 0").unwrap(), &tr).unwrap().value, 1.0);
        // Window [1.5, 2.5]: endpoints 2.5 and 2, interior sample 4.
        assert_eq!(robustness(&parse("G[1.5,2.5] x > 0").unwrap(), &tr).unwrap().value, 2.0);
        assert_eq!(robustness(&parse("F[1.5,2.5] x > 0").unwrap(), &tr).unwrap().value, 4.0);
    }

    #[test]
    fn unbounded_window_is_cut_to_the_trace() {
        let tr = trace(&[0.0, 1.0, 2.0], &[2.0, 3.0, 1.5]);
        assert_eq!(robustness(&parse("G[0,inf] x > 0").unwrap(), &tr).unwrap().value, 1.5);
        // Inner F needs one second, so the outer G stops at t = 1.
        assert_eq!(robustness(&parse("G[0,inf] F[1,1] x > 0").unwrap(), &tr).unwrap().value, 1.5);
        assert_eq!(robustness(&parse("G[0,inf] F[0,1] x > 0").unwrap(), &tr).unwrap().value, 3.0);
    }

    #[test]
    fn horizon_too_short() {
        let tr = trace(&[0.0, 1.0], &[1.0, 1.0]);
        assert!(matches!(robustness(&parse("G[0,2] x > 0").unwrap(), &tr), Err(StlError::HorizonTooShort { .. })));
    }

    #[test]
    fn unknown_signal() {
        let tr = trace(&[0.0, 1.0], &[1.0, 1.0]);
        assert_eq!(robustness(&parse("y > 0").unwrap(), &tr), Err(StlError::UnknownSignal("y".into())));
    }
}
