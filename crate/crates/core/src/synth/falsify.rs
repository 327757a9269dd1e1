use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cmaes::Cmaes;
use super::space::{Point, SearchSpace};
use super::{Scenario, SynthError};
use crate::sim::SimError;
use crate::stl::robustness;
use crate::{Simulator, Trace};

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyBudget {
    /// Objective evaluations per run.
    pub max_evals: usize,
    /// Checked between generations. Hitting it makes the outcome depend on
    /// machine speed, so deterministic runs should rely on `max_evals`.
    pub wall_time: Duration,
    /// Size of the evaluation pool; 0 uses every core.
    pub workers: usize,
}

impl Default for FalsifyBudget {
    fn default() -> Self {
        Self { max_evals: 200, wall_time: Duration::from_secs(30), workers: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub point: Point,
    pub rho: f64,
    /// Missing when the simulation stopped on an invariant violation or
    /// overflow, which count as `rho = -inf`.
    pub trace: Option<Trace>,
}

#[derive(Debug, Clone)]
pub struct FalsificationResult {
    pub found: bool,
    /// The violating point if `found`, otherwise the lowest robustness seen.
    pub witness: Witness,
    pub evals: usize,
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool, SynthError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| SynthError::Pool(e.to_string()))
}

/// Simulates one candidate and scores it.
pub(crate) fn evaluate(
    sim: &Simulator,
    scenario: &Scenario,
    point: &Point,
    seed: u64,
) -> Result<(f64, Option<Trace>), SynthError> {
    match sim.run(&point.signals, &point.init, &point.params, &scenario.config(seed)) {
        Ok(tr) => Ok((robustness(&scenario.spec, &tr)?.value, Some(tr))),
        Err(SimError::InvariantViolated { .. } | SimError::NumericOverflow { .. }) => Ok((f64::NEG_INFINITY, None)),
        Err(e) => Err(e.into()),
    }
}

/// Searches `space` for a violation of the scenario's spec with CMA-ES.
/// Candidates of a generation are simulated in parallel and inspected in
/// index order, so the result depends only on `seed`.
pub fn falsify(
    scenario: &Scenario,
    space: &SearchSpace,
    budget: &FalsifyBudget,
    seed: u64,
) -> Result<FalsificationResult, SynthError> {
    if budget.max_evals == 0 {
        return Err(SynthError::BadBudget("max_evals must be at least 1".into()));
    }
    let sim = Simulator::new(&scenario.model)?;
    let pool = pool(budget.workers)?;
    let start = Instant::now();

    if space.is_empty() {
        let point = space.point(scenario, &[]);
        let (rho, trace) = evaluate(&sim, scenario, &point, seed)?;
        return Ok(FalsificationResult { found: rho <= 0.0, witness: Witness { point, rho, trace }, evals: 1 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut es = Cmaes::new(space.len());
    let mut best: Option<Witness> = None;
    let mut evals = 0;
    while evals < budget.max_evals && (evals == 0 || start.elapsed() < budget.wall_time) {
        let mut xs = es.ask(&mut rng);
        let full = xs.len() <= budget.max_evals - evals;
        xs.truncate(budget.max_evals - evals);
        let points: Vec<Point> = xs.iter().map(|x| space.point(scenario, x)).collect();
        let scored: Vec<(f64, Option<Trace>)> =
            pool.install(|| points.par_iter().map(|p| evaluate(&sim, scenario, p, seed)).collect::<Result<_, _>>())?;
        evals += xs.len();
        let fs: Vec<f64> = scored.iter().map(|s| s.0).collect();
        for (point, (rho, trace)) in points.into_iter().zip(scored) {
            if best.as_ref().is_none_or(|b| rho < b.rho) || rho <= 0.0 {
                best = Some(Witness { point, rho, trace });
            }
            if rho <= 0.0 {
                return Ok(FalsificationResult { found: true, witness: best.expect("just set"), evals });
            }
        }
        if full {
            es.tell(&xs, &fs, &mut rng);
        }
    }
    Ok(FalsificationResult { found: false, witness: best.expect("at least one evaluation"), evals })
}
