use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use hyrepair::model::{validate, HybridModel, Init, VarKind};
use hyrepair::sim::{parse_signals, sample_init, InputSignal, SimConfig};
use hyrepair::synth::{falsify, synthesize, FalsifyBudget, Scenario, SearchSpace, Status, SynthBudget, SynthProblem};
use hyrepair::{cases, hatl, stl, Simulator};
use serde_json::json;

use crate::files::{assignments, load_model, mined, range, read, write_atomic};
use crate::{Command, FalsifyArgs, SimArgs};

pub fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Validate { model } => cmd_validate(&model),
        Command::Transform { model, script, out } => cmd_transform(&model, &script, &out),
        Command::Simulate { model, signals, set, init, sim, out } => {
            cmd_simulate(&model, signals.as_deref(), &set, &init, &sim, &out)
        }
        Command::Falsify { model, spec, signals, params, set, sim, budget, out } => {
            let scenario = scenario(load_model(&model)?, &spec, signals.as_deref(), &set, &sim)?;
            let ranges = params.iter().map(|p| range(p)).collect::<Result<Vec<_>>>()?;
            cmd_falsify(&scenario, &ranges, &budget, seed(&sim)?, out.as_deref())
        }
        Command::Repair {
            model,
            pattern,
            spec,
            signals,
            params,
            set,
            sim,
            budget,
            rounds,
            probes,
            validation,
            out,
        } => {
            let start = Instant::now();
            let original = load_model(&model)?;
            let repaired = hatl::run(&original, &read(&pattern)?).map_err(|e| anyhow!("{}: {e}", pattern.display()))?;
            let transform_s = start.elapsed().as_secs_f64();
            let scenario = scenario(repaired, &spec, signals.as_deref(), &set, &sim)?;
            let problem = SynthProblem {
                scenario,
                mined: params.iter().map(|p| mined(p)).collect::<Result<_>>()?,
                budget: SynthBudget { falsify: falsify_budget(&budget)?, rounds, probes, validation },
                seed: seed(&sim)?,
            };
            cmd_repair(&problem, transform_s, &out)
        }
        Command::Summarize { dirs } => cmd_summarize(&dirs),
        Command::ExportCases { dir } => {
            for (name, contents) in cases::files() {
                write_atomic(&dir.join(name), &contents)?;
            }
            println!("wrote {} files to {}", cases::files().len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// `--seed`, unless `HYREPAIR_SEED` is set.
fn seed(sim: &SimArgs) -> Result<u64> {
    match std::env::var("HYREPAIR_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("HYREPAIR_SEED is not a number: '{s}'")),
        Err(_) => Ok(sim.seed),
    }
}

fn falsify_budget(b: &FalsifyArgs) -> Result<FalsifyBudget> {
    if b.wall_time.is_nan() || b.wall_time <= 0.0 {
        bail!("--wall-time must be positive");
    }
    Ok(FalsifyBudget { max_evals: b.evals, wall_time: Duration::from_secs_f64(b.wall_time), workers: b.workers })
}

fn load_signals(path: Option<&Path>) -> Result<Vec<InputSignal>> {
    match path {
        Some(p) => parse_signals(&read(p)?).with_context(|| format!("{} is not a valid signal file", p.display())),
        None => Ok(Vec::new()),
    }
}

fn scenario(
    model: HybridModel,
    spec: &Path,
    signals: Option<&Path>,
    set: &[String],
    sim: &SimArgs,
) -> Result<Scenario> {
    let constants = BTreeMap::from([("T".to_string(), sim.horizon)]);
    let spec = stl::parse_with_constants(&read(spec)?, &constants).with_context(|| format!("in {}", spec.display()))?;
    let mut scn = Scenario::new(model, spec, load_signals(signals)?, sim.horizon, sim.step);
    scn.params = assignments(set)?;
    Ok(scn)
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let diags = validate(&load_model(path)?);
    if diags.is_empty() {
        println!("{}: valid", path.display());
        return Ok(ExitCode::SUCCESS);
    }
    for d in &diags {
        println!("{}: {d}", path.display());
    }
    Ok(ExitCode::FAILURE)
}

fn cmd_transform(model: &Path, script: &Path, out: &Path) -> Result<ExitCode> {
    let m = load_model(model)?;
    let result = hatl::run(&m, &read(script)?).map_err(|e| anyhow!("{}: {e}", script.display()))?;
    write_atomic(out, &result.to_json())?;
    println!("{}: {} modes, {} transitions", out.display(), result.modes.len(), result.transitions.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(
    model: &Path,
    signals: Option<&Path>,
    set: &[String],
    init: &[String],
    sim: &SimArgs,
    out: &Path,
) -> Result<ExitCode> {
    let m = load_model(model)?;
    let signals = load_signals(signals)?;
    let seed = seed(sim)?;
    let mut x0 = sample_init(&m, seed);
    x0.extend(assignments(init)?);
    let cfg = SimConfig { seed, ..SimConfig::with_horizon(sim.horizon).step(sim.step) };
    let simulator = Simulator::new(&m)?;
    let trace = simulator.run(&signals, &x0, &assignments(set)?, &cfg)?;
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let plot = out.with_file_name(format!("{stem}.plot.json"));
    write_atomic(out, &trace.to_csv())?;
    write_atomic(&plot, &trace.to_plot_json(&simulator.mode_names()))?;
    println!("{}: {} samples, {} mode switches", out.display(), trace.len(), trace.switches());
    Ok(ExitCode::SUCCESS)
}

fn cmd_falsify(
    scenario: &Scenario,
    ranges: &[(String, f64, f64)],
    budget: &FalsifyArgs,
    seed: u64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let space = SearchSpace::new(scenario, ranges)?;
    let res = falsify(scenario, &space, &falsify_budget(budget)?, seed)?;
    let w = &res.witness;
    if res.found {
        println!("falsified after {} evaluations, robustness {}", res.evals, w.rho);
    } else {
        println!("not falsified in {} evaluations, lowest robustness {}", res.evals, w.rho);
    }
    if let Some(out) = out {
        let doc = json!({
            "found": res.found,
            "rho": w.rho,
            "evals": res.evals,
            "params": w.point.params,
            "init": w.point.init,
            "signals": w.point.signals,
        });
        write_atomic(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_repair(problem: &SynthProblem, transform_s: f64, out: &Path) -> Result<ExitCode> {
    let start = Instant::now();
    let result = synthesize(problem)?;
    let synthesis_s = start.elapsed().as_secs_f64();
    write_atomic(&out.join("report.json"), &result.to_json())?;
    let timing = json!({ "transform_s": transform_s, "synthesis_s": synthesis_s });
    write_atomic(&out.join("timing.json"), &(serde_json::to_string_pretty(&timing)? + "\n"))?;
    if result.status == Status::Failure {
        println!("repair failed: {}", result.recommendation.as_deref().unwrap_or_default());
        return Ok(ExitCode::from(3));
    }
    let mut repaired = problem.scenario.model.clone();
    for (name, value) in problem.scenario.params.iter().chain(&result.best_params) {
        if let Some(v) = repaired.var_mut(name).filter(|v| v.kind == VarKind::Param) {
            v.init = Init::Value(*value);
        }
    }
    write_atomic(&out.join("repaired.model.json"), &repaired.to_json())?;
    for (name, value) in &result.best_params {
        println!("{name} = {value}");
    }
    if let Some(v) = &result.validation {
        println!("validated on {} random runs, lowest robustness {}", v.n, v.min_rho);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_summarize(dirs: &[std::path::PathBuf]) -> Result<ExitCode> {
    println!(
        "{:<28} {:<8} {:<22} {:>12} {:>12} {:>12}",
        "run", "status", "range", "value", "transform s", "synthesis s"
    );
    for dir in dirs {
        let report: serde_json::Value = serde_json::from_str(&read(&dir.join("report.json"))?)?;
        let timing: serde_json::Value = serde_json::from_str(&read(&dir.join("timing.json"))?)?;
        let ranges = report["rounds"][0]["range_before"].as_object().cloned().unwrap_or_default();
        let best = report["best_params"].as_object().cloned().unwrap_or_default();
        let names: Vec<&String> = ranges.keys().collect();
        let range =
            names.iter().map(|n| format!("{n} [{}, {}]", ranges[*n][0], ranges[*n][1])).collect::<Vec<_>>().join(" ");
        let value = names
            .iter()
            .filter_map(|n| best.get(*n))
            .map(|v| format!("{:.5}", v.as_f64().unwrap_or(f64::NAN)))
            .collect::<Vec<_>>()
            .join(" ");
        println!(
            "{:<28} {:<8} {:<22} {:>12} {:>12.3} {:>12.3}",
            dir.display(),
            report["status"].as_str().unwrap_or("?"),
            range,
            if value.is_empty() { "-".to_string() } else { value },
            timing["transform_s"].as_f64().unwrap_or(f64::NAN),
            timing["synthesis_s"].as_f64().unwrap_or(f64::NAN),
        );
    }
    Ok(ExitCode::SUCCESS)
}
