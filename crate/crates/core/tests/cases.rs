use hyrepair::cases;
use hyrepair::hatl;
use hyrepair::model::{validate, HybridModel};
use hyrepair::sim::parse_signals;
use hyrepair::synth::{falsify, validate as validate_runs, FalsifyBudget, SearchSpace};

const ACC_JSON: &str = include_str!("../assets/acc.model.json");
const SMIB_JSON: &str = include_str!("../assets/smib.model.json");
const SMIB_ATTACKED_JSON: &str = include_str!("../assets/smib_attacked.model.json");

#[test]
fn model_files_match_the_builders() {
    for (text, built) in
        [(ACC_JSON, cases::acc()), (SMIB_JSON, cases::smib()), (SMIB_ATTACKED_JSON, cases::smib_attacked())]
    {
        assert_eq!(text, built.to_json(), "{} is stale", built.name);
        assert_eq!(HybridModel::from_json(text).unwrap(), built);
        assert_eq!(validate(&built), vec![]);
    }
}

#[test]
fn bundled_files_parse() {
    for s in [cases::ACC_NOMINAL_SIGNALS, cases::ACC_ATTACK_SIGNALS, cases::SMIB_SIGNALS] {
        parse_signals(s).unwrap();
    }
    hyrepair::stl::parse(cases::ACC_SPEC).unwrap();
    hyrepair::stl::parse(cases::SMIB_SPEC).unwrap();
}

#[test]
fn every_pattern_yields_a_valid_model() {
    for p in [cases::PATTERN1, cases::PATTERN2, cases::PATTERN3] {
        assert_eq!(validate(&hatl::run(&cases::acc(), p).unwrap()), vec![]);
    }
    assert_eq!(validate(&hatl::run(&cases::smib(), cases::DWELL).unwrap()), vec![]);
    assert_eq!(validate(&hatl::run(&cases::smib_attacked(), cases::DWELL).unwrap()), vec![]);
}

#[test]
fn nominal_acc_withstands_falsification() {
    let scn = cases::acc_scenario(cases::acc(), false);
    let res = falsify(&scn, &SearchSpace::new(&scn, &[]).unwrap(), &FalsifyBudget::default(), 0).unwrap();
    assert!(!res.found, "rho {}", res.witness.rho);
}

#[test]
fn gps_spoofing_breaks_the_acc() {
    let scn = cases::acc_scenario(cases::acc(), true);
    let res = falsify(&scn, &SearchSpace::new(&scn, &[]).unwrap(), &FalsifyBudget::default(), 0).unwrap();
    assert!(res.found);
}

#[test]
fn smib_is_stable_without_attack() {
    let scn = cases::smib_scenario(cases::smib());
    let res = falsify(&scn, &SearchSpace::new(&scn, &[]).unwrap(), &FalsifyBudget::default(), 0).unwrap();
    assert!(!res.found, "rho {}", res.witness.rho);
    assert!(validate_runs(&scn, &Default::default(), 100, 0, 1).unwrap().passed());
}

#[test]
fn sliding_mode_attack_destabilises_the_smib() {
    let scn = cases::smib_scenario(cases::smib_attacked());
    let res = falsify(&scn, &SearchSpace::new(&scn, &[]).unwrap(), &FalsifyBudget::default(), 0).unwrap();
    assert!(res.found);
    // The violating trace leaves the stability box.
    let tr = res.witness.trace.unwrap();
    let delta = tr.column("delta").unwrap();
    let omega = tr.column("omega").unwrap();
    let out = delta.iter().zip(omega).any(|(d, w)| !(0.0..=3.5).contains(d) || !(-2.0..=3.0).contains(w));
    assert!(out);
}
