use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::falsify::{evaluate, falsify, pool, FalsifyBudget};
use super::space::Point;
use super::space::SearchSpace;
use super::{Scenario, SynthError};
use crate::sim::{derive_seed, sample_init, Assignment};
use crate::Simulator;

/// Which way a parameter has to move to make the requirement easier to
/// satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    /// Larger values are safer.
    Increasing,
    /// Smaller values are safer.
    Decreasing,
}

impl FromStr for Monotonicity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inc" | "increasing" => Ok(Self::Increasing),
            "dec" | "decreasing" => Ok(Self::Decreasing),
            _ => Err(format!("expected 'inc' or 'dec', got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedParam {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub monotonicity: Monotonicity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthBudget {
    pub falsify: FalsifyBudget,
    pub rounds: usize,
    /// Bisection probes per mined parameter.
    pub probes: usize,
    /// Random runs the final candidate must pass.
    pub validation: usize,
}

impl Default for SynthBudget {
    fn default() -> Self {
        Self { falsify: FalsifyBudget::default(), rounds: 5, probes: 20, validation: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct SynthProblem {
    pub scenario: Scenario,
    pub mined: Vec<MinedParam>,
    pub budget: SynthBudget,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub range_before: BTreeMap<String, [f64; 2]>,
    /// Mined parameter values of the violating run, if one was found.
    pub counterexample: Option<BTreeMap<String, f64>>,
    /// Lowest robustness of the round; `null` in JSON when an invariant broke.
    pub rho: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub param: String,
    pub value: f64,
    pub falsified: bool,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub n: usize,
    pub satisfied: usize,
    pub min_rho: f64,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.satisfied == self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthResult {
    pub status: Status,
    pub best_params: BTreeMap<String, f64>,
    pub final_ranges: BTreeMap<String, [f64; 2]>,
    pub rounds: Vec<Round>,
    pub probes: Vec<Probe>,
    pub validation: Option<Validation>,
    pub evals: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<String>,
}

impl SynthResult {
    /// Pretty JSON report with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Seed of validation run `i` for a problem seeded with `seed`.
pub fn validation_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, &format!("validation/{i}"))
}

/// Simulates `n` runs with random initial states and random inputs drawn
/// from the scenario's signals, with `params` fixed. Run `i` uses
/// [`validation_seed`]`(seed, i)` for both.
pub fn validate(
    scenario: &Scenario,
    params: &Assignment,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Validation, SynthError> {
    let sim = Simulator::new(&scenario.model)?;
    let mut merged = scenario.params.clone();
    merged.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    let rhos: Vec<f64> = pool(workers)?.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let s = validation_seed(seed, i);
                let point = Point {
                    params: merged.clone(),
                    init: sample_init(&scenario.model, s),
                    signals: scenario.signals.clone(),
                };
                evaluate(&sim, scenario, &point, s).map(|r| r.0)
            })
            .collect::<Result<_, _>>()
    })?;
    Ok(Validation {
        n,
        satisfied: rhos.iter().filter(|&&r| r > 0.0).count(),
        min_rho: rhos.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

const RECOMMENDATION: &str =
    "no safe value was found in the given range; search a different parameter range or try another resiliency pattern";

/// Counterexample-guided range shrinking, then bisection towards the
/// tightest safe value of each mined parameter, then validation.
///
/// The bisection tolerance and the safety margin added to the boundary are
/// both 1% of the original range width.
pub fn synthesize(problem: &SynthProblem) -> Result<SynthResult, SynthError> {
    let SynthProblem { scenario, mined, budget, seed } = problem;
    for p in mined {
        if p.lo > p.hi || p.lo.is_nan() || p.hi.is_nan() {
            return Err(SynthError::BadRange { name: p.name.clone(), lo: p.lo, hi: p.hi });
        }
    }
    let mut ranges: Vec<(f64, f64)> = mined.iter().map(|p| (p.lo, p.hi)).collect();
    let mut tight_end_unsafe = vec![false; mined.len()];
    let mut out = SynthResult {
        status: Status::Failure,
        best_params: BTreeMap::new(),
        final_ranges: BTreeMap::new(),
        rounds: Vec::new(),
        probes: Vec::new(),
        validation: None,
        evals: 0,
        recommendation: None,
    };
    let snapshot = |ranges: &[(f64, f64)]| -> BTreeMap<String, [f64; 2]> {
        mined.iter().zip(ranges).map(|(p, r)| (p.name.clone(), [r.0, r.1])).collect()
    };
    let fail = |mut out: SynthResult, ranges: &[(f64, f64)]| {
        out.final_ranges = snapshot(ranges);
        out.recommendation = Some(RECOMMENDATION.to_string());
        Ok(out)
    };

    for r in 0..budget.rounds {
        let dims: Vec<(String, f64, f64)> =
            mined.iter().zip(&ranges).map(|(p, r)| (p.name.clone(), r.0, r.1)).collect();
        let space = SearchSpace::new(scenario, &dims)?;
        let res = falsify(scenario, &space, &budget.falsify, derive_seed(*seed, &format!("round/{r}")))?;
        out.evals += res.evals;
        let mut round =
            Round { range_before: snapshot(&ranges), counterexample: None, rho: res.witness.rho, evals: res.evals };
        if !res.found {
            out.rounds.push(round);
            break;
        }
        let cex: BTreeMap<String, f64> =
            mined.iter().map(|p| (p.name.clone(), res.witness.point.params[&p.name])).collect();
        round.counterexample = Some(cex.clone());
        out.rounds.push(round);
        let mut emptied = false;
        for (i, p) in mined.iter().enumerate() {
            let c = cex[&p.name];
            match p.monotonicity {
                Monotonicity::Increasing => {
                    emptied |= c >= ranges[i].1;
                    ranges[i].0 = c;
                }
                Monotonicity::Decreasing => {
                    emptied |= c <= ranges[i].0;
                    ranges[i].1 = c;
                }
            }
            tight_end_unsafe[i] = true;
        }
        if emptied {
            return fail(out, &ranges);
        }
    }

    // Mined parameters not yet refined sit at their safe end.
    let mut chosen: Assignment =
        mined.iter().zip(&ranges).map(|(p, r)| (p.name.clone(), safe_end(p.monotonicity, *r))).collect();
    for (i, p) in mined.iter().enumerate() {
        let width = p.hi - p.lo;
        let tol = 0.01 * width;
        let (mut good, mut bad) = match p.monotonicity {
            Monotonicity::Increasing => (ranges[i].1, ranges[i].0),
            Monotonicity::Decreasing => (ranges[i].0, ranges[i].1),
        };
        let probe = |value: f64, k: &str, out: &mut SynthResult| -> Result<bool, SynthError> {
            let mut fixed = scenario.clone();
            fixed.params.extend(chosen.iter().map(|(k, v)| (k.clone(), *v)));
            fixed.params.insert(p.name.clone(), value);
            let space = SearchSpace::new(&fixed, &[])?;
            let res = falsify(&fixed, &space, &budget.falsify, derive_seed(*seed, &format!("probe/{}/{k}", p.name)))?;
            out.evals += res.evals;
            out.probes.push(Probe { param: p.name.clone(), value, falsified: res.found, rho: res.witness.rho });
            Ok(res.found)
        };
        if probe(good, "safe", &mut out)? {
            return fail(out, &ranges);
        }
        let best = if !tight_end_unsafe[i] && !probe(bad, "tight", &mut out)? {
            bad
        } else {
            let mut k = 0;
            while (good - bad).abs() > tol && k < budget.probes {
                let mid = 0.5 * (good + bad);
                if probe(mid, &k.to_string(), &mut out)? {
                    bad = mid;
                } else {
                    good = mid;
                }
                k += 1;
            }
            match p.monotonicity {
                Monotonicity::Increasing => (good + tol).min(p.hi),
                Monotonicity::Decreasing => (good - tol).max(p.lo),
            }
        };
        ranges[i] = match p.monotonicity {
            Monotonicity::Increasing => (bad, ranges[i].1),
            Monotonicity::Decreasing => (ranges[i].0, bad),
        };
        chosen.insert(p.name.clone(), best);
    }

    let validation = validate(scenario, &chosen, budget.validation, *seed, budget.falsify.workers)?;
    out.best_params = chosen.into_iter().collect();
    out.final_ranges = snapshot(&ranges);
    let passed = validation.passed();
    out.validation = Some(validation);
    if passed {
        out.status = Status::Success;
        Ok(out)
    } else {
        fail(out, &ranges)
    }
}

fn safe_end(m: Monotonicity, (lo, hi): (f64, f64)) -> f64 {
    match m {
        Monotonicity::Increasing => hi,
        Monotonicity::Decreasing => lo,
    }
}
