mod common;

use common::{growth, model, threshold_problem};
use hyrepair::model::{Init, VarKind};
use hyrepair::sim::{sample_init, simulate, SimConfig};
use hyrepair::stl::{parse, robustness};
use hyrepair::synth::{falsify, synthesize, validate, validation_seed, FalsifyBudget, Scenario, SearchSpace, Status};
use proptest::prelude::*;

#[test]
fn growth_fixture_is_falsified_past_ln_10() {
    let scn = Scenario::new(growth(), parse("G[0,1] (x < 10)").unwrap(), vec![], 1.0, 1e-3);
    let space = SearchSpace::new(&scn, &[("theta".into(), 0.0, 5.0)]).unwrap();
    let budget = FalsifyBudget { max_evals: 200, ..FalsifyBudget::default() };
    let mut good = 0;
    for seed in 0..100 {
        let res = falsify(&scn, &space, &budget, seed).unwrap();
        assert!(res.evals <= 200);
        if res.found {
            assert!(res.witness.rho <= 0.0);
            if res.witness.point.params["theta"] >= 10f64.ln() - 0.05 {
                good += 1;
            }
        }
    }
    assert!(good >= 95, "{good}/100");
}

#[test]
fn growth_fixture_is_safe_below_one() {
    let scn = Scenario::new(growth(), parse("G[0,1] (x < 10)").unwrap(), vec![], 1.0, 1e-3);
    let space = SearchSpace::new(&scn, &[("theta".into(), 0.0, 1.0)]).unwrap();
    let res = falsify(&scn, &space, &FalsifyBudget::default(), 3).unwrap();
    assert!(!res.found);
    assert_eq!(res.evals, 200);
    // Best found is close to theta = 1, where the margin is 10 - e.
    assert!((res.witness.rho - (10.0 - 1f64.exp())).abs() < 0.05, "{}", res.witness.rho);
}

#[test]
fn unbound_and_unknown_params_are_rejected() {
    let scn = Scenario::new(growth(), parse("G[0,1] (x < 10)").unwrap(), vec![], 1.0, 1e-3);
    assert!(SearchSpace::new(&scn, &[]).is_err());
    assert!(SearchSpace::new(&scn, &[("nope".into(), 0.0, 1.0)]).is_err());
    assert!(SearchSpace::new(&scn, &[("theta".into(), 2.0, 1.0)]).is_err());
}

#[test]
fn invariant_violation_is_a_witness() {
    let m = model(
        &[("x", VarKind::State, Init::Value(0.0)), ("k", VarKind::Param, Init::Unset)],
        &[("run", "x < 1", &[("x", "k")])],
        &[],
    );
    let scn = Scenario::new(m, parse("G[0,2] (x < 5)").unwrap(), vec![], 2.0, 1e-2);
    let space = SearchSpace::new(&scn, &[("k".into(), 0.0, 1.0)]).unwrap();
    let res = falsify(&scn, &space, &FalsifyBudget::default(), 0).unwrap();
    assert!(res.found);
    assert_eq!(res.witness.rho, f64::NEG_INFINITY);
    assert!(res.witness.trace.is_none());
}

#[test]
fn threshold_is_recovered_in_every_seeded_run() {
    let tol = 0.01 * 2.0;
    for seed in 0..100 {
        let res = synthesize(&threshold_problem(1.0, 0.0, 2.0, seed)).unwrap();
        assert_eq!(res.status, Status::Success, "seed {seed}");
        let theta = res.best_params["theta"];
        assert!((theta - 1.0).abs() <= 2.0 * tol, "seed {seed}: {theta}");
        assert!(theta < 1.0);
        for r in &res.rounds {
            if let Some(c) = &r.counterexample {
                // The discarded part [c, hi] only holds unsafe values.
                assert!(c["theta"] >= 1.0 - 1e-6, "seed {seed}: {c:?}");
            }
        }
    }
}

#[test]
fn range_that_holds_no_safe_value_fails() {
    let res = synthesize(&threshold_problem(1.0, 1.2, 2.0, 0)).unwrap();
    assert_eq!(res.status, Status::Failure);
    assert!(res.recommendation.unwrap().contains("another resiliency pattern"));
    assert!(res.validation.is_none());
}

#[test]
fn fully_safe_range_returns_its_tight_end() {
    let res = synthesize(&threshold_problem(1.0, 0.1, 0.6, 0)).unwrap();
    assert_eq!(res.status, Status::Success);
    assert_eq!(res.best_params["theta"], 0.6);
}

#[test]
fn success_is_sound_on_the_recorded_validation_seeds() {
    let problem = threshold_problem(1.0, 0.0, 2.0, 42);
    let res = synthesize(&problem).unwrap();
    let v = res.validation.as_ref().unwrap();
    assert_eq!((v.n, v.satisfied), (50, 50));
    let spec = &problem.scenario.spec;
    for i in 0..v.n {
        let s = validation_seed(problem.seed, i);
        let init = sample_init(&problem.scenario.model, s);
        let params = res.best_params.clone().into_iter().collect();
        let cfg = SimConfig::<f64> { seed: s, ..SimConfig::with_horizon(2.0).step(1e-3) };
        let tr = simulate(&problem.scenario.model, &[], &init, &params, &cfg).unwrap();
        assert!(robustness(spec, &tr).unwrap().value > 0.0);
    }
    let again = validate(&problem.scenario, &res.best_params.clone().into_iter().collect(), 50, 42, 1).unwrap();
    assert_eq!(&again, v);
}

#[test]
fn synthesis_is_reproducible_for_any_worker_count() {
    let mut problem = threshold_problem(1.0, 0.0, 2.0, 9);
    let reports: Vec<String> = [1, 2, 4]
        .into_iter()
        .map(|w| {
            problem.budget.falsify.workers = w;
            synthesize(&problem).unwrap().to_json()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn report_has_the_documented_fields() {
    let res = synthesize(&threshold_problem(1.0, 0.0, 2.0, 1)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&res.to_json()).unwrap();
    for key in ["status", "best_params", "rounds", "validation", "evals"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["status"], "success");
    let round = &v["rounds"][0];
    for key in ["range_before", "counterexample", "rho"] {
        assert!(round.get(key).is_some(), "{key}");
    }
    assert!(v["validation"]["min_rho"].as_f64().unwrap() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bisection_finds_any_monotone_boundary(bound in 0.6f64..1.9, seed in 0u64..1000) {
        let res = synthesize(&threshold_problem(bound, 0.0, 2.0, seed)).unwrap();
        prop_assert_eq!(res.status, Status::Success);
        let theta = res.best_params["theta"];
        prop_assert!(theta < bound && bound - theta <= 2.0 * 0.02, "{} vs {}", theta, bound);
    }
}
