use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::time::Duration;

use serde_json::json;
use stable_plans::crash::verify_crash_stability;
use stable_plans::format::{
    parse_plan, parse_system, parse_system_unchecked, serialize_plan, serialize_system, SystemFile,
};
use stable_plans::generators::{
    assignment_to_plan, gen_grid, gen_random, gen_random_with_plan, parse_dimacs, reduce_3sat,
    Assignment, RandomSizes,
};
use stable_plans::incomplete::{
    decode_cplan, lift, verify_ii_efficiency, verify_ii_stability, ConditionalPlanDag,
    DetectionMonitor, IiEfficiency, InitialSet, MonitorEvent,
};
use stable_plans::kstable::{sjpa_with, verify_kstable, WindowOptions};
use stable_plans::model::{execute_open, Agent, JointOpenPlan};
use stable_plans::stability::{
    brute_force_verify_with_budget, verify_detection, verify_stable, Instability, StabilityVerdict,
};
use stable_plans::synth::{sjpp_search, SynthBudget, Synthesis};
use stable_plans::{Error, Result};

use crate::args::{CondPlanArgs, PlanArgs, SystemArg};
use crate::report::{show_configs, Report, EXIT_DISAGREEMENT, EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK};

/// Input files and standard input; standard input can be read once.
pub struct Inputs<'a> {
    stdin: Option<&'a mut dyn Read>,
}

impl<'a> Inputs<'a> {
    pub fn new(stdin: &'a mut dyn Read) -> Self {
        Inputs { stdin: Some(stdin) }
    }

    fn read_stdin(&mut self) -> Result<String> {
        let stdin = self
            .stdin
            .take()
            .ok_or_else(|| Error::Invalid("standard input can only be read once".into()))?;
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| Error::Invalid(format!("cannot read standard input: {e}")))?;
        Ok(s)
    }

    fn read(&mut self, path: Option<&Path>) -> Result<String> {
        match path {
            None => self.read_stdin(),
            Some(p) if p.as_os_str() == "-" => self.read_stdin(),
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display()))),
        }
    }

    fn system(&mut self, arg: &SystemArg) -> Result<SystemFile> {
        parse_system(&self.read(arg.system.as_deref())?)
    }

    fn plan(&mut self, input: &PlanArgs) -> Result<(SystemFile, JointOpenPlan)> {
        let file = self.system(&input.system)?;
        let plan = parse_plan(&file.system, &self.read(Some(&input.plan))?)?;
        Ok((file, plan))
    }

    fn cond_plans(
        &mut self,
        input: &CondPlanArgs,
    ) -> Result<(SystemFile, ConditionalPlanDag, ConditionalPlanDag)> {
        let file = self.system(&input.system)?;
        let (p1, p2) = match (&input.plan, &input.cplan1, &input.cplan2) {
            (Some(p), _, _) => {
                let plan = parse_plan(&file.system, &self.read(Some(p))?)?;
                (lift(&plan, Agent::One), lift(&plan, Agent::Two))
            }
            (None, Some(a), Some(b)) => (
                decode_cplan(&file.system, Agent::One, &self.read(Some(a))?)?,
                decode_cplan(&file.system, Agent::Two, &self.read(Some(b))?)?,
            ),
            _ => {
                return Err(Error::Invalid(
                    "give either --plan or both --cplan1 and --cplan2".into(),
                ))
            }
        };
        Ok((file, p1, p2))
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn agent_arg(n: Option<u8>) -> Vec<Agent> {
    match n.and_then(Agent::from_number) {
        Some(a) => vec![a],
        None => Agent::BOTH.to_vec(),
    }
}

fn stability_report(cmd: &str, file: &SystemFile, v: &StabilityVerdict) -> Report {
    let (token, code) = if v.is_stable() {
        ("STABLE", EXIT_OK)
    } else {
        ("UNSTABLE", EXIT_NEGATIVE)
    };
    let mut r = Report::new(cmd, token, code);
    r.verdict_detail(&file.system, v);
    r
}

pub fn validate(inputs: &mut Inputs, arg: &SystemArg) -> Result<Report> {
    let file = parse_system_unchecked(&inputs.read(arg.system.as_deref())?)?;
    let defects = file.system.validate();
    let mut r = if defects.is_empty() {
        Report::new("validate", "VALID", EXIT_OK)
    } else {
        Report::new("validate", "INVALID", EXIT_ERROR)
    };
    let sys = &file.system;
    r.line(format!("configurations: {}", sys.num_configs()));
    r.line(format!(
        "initial: {}",
        show_configs(sys, &file.init).join(" ")
    ));
    r.line(format!("goal patterns: {}", file.goal.patterns.len()));
    for d in &defects {
        r.line(format!("defect: {d}"));
    }
    r.field("configurations", json!(sys.num_configs()));
    r.field(
        "defects",
        json!(defects.iter().map(|d| d.to_string()).collect::<Vec<_>>()),
    );
    Ok(r)
}

pub fn verify(
    inputs: &mut Inputs,
    input: &PlanArgs,
    agent: Option<u8>,
    oracle: bool,
    oracle_budget: u64,
) -> Result<Report> {
    let (file, plan) = inputs.plan(input)?;
    let (sys, c0, goal) = (&file.system, file.single_init()?, &file.goal);
    let verdict = match agent.and_then(Agent::from_number) {
        Some(dev) => match verify_detection(sys, c0, goal, &plan, dev) {
            Err(Error::NotEfficient(why)) => {
                StabilityVerdict::Unstable(Instability::NotEfficient(why))
            }
            other => other?,
        },
        None => verify_stable(sys, c0, goal, &plan)?,
    };
    let mut r = stability_report("verify", &file, &verdict);
    if !oracle
        || matches!(
            verdict,
            StabilityVerdict::Unstable(Instability::NotEfficient(_))
        )
    {
        return Ok(r);
    }
    for dev in agent_arg(agent) {
        let fast = verify_detection(sys, c0, goal, &plan, dev)?;
        let slow = brute_force_verify_with_budget(sys, c0, goal, &plan, dev, oracle_budget)?;
        if fast.is_stable() != slow.is_stable() {
            let mut d = Report::new("verify", "ORACLE_DISAGREEMENT", EXIT_DISAGREEMENT);
            d.line(format!("deviator: agent {}", dev.number()));
            d.line(format!(
                "detection: {}",
                if fast.is_stable() {
                    "stable"
                } else {
                    "unstable"
                }
            ));
            d.line(format!(
                "exhaustive: {}",
                if slow.is_stable() {
                    "stable"
                } else {
                    "unstable"
                }
            ));
            for (label, v) in [("detection", &fast), ("exhaustive", &slow)] {
                if let Some(cex) = v.counterexample() {
                    d.line(format!("{label}:"));
                    d.counterexample_as(&format!("{label}_counterexample"), sys, cex);
                }
            }
            return Ok(d);
        }
    }
    r.line("oracle: agrees");
    r.field("oracle", json!("agrees"));
    Ok(r)
}

pub fn verify_k(inputs: &mut Inputs, input: &PlanArgs, k: usize) -> Result<Report> {
    let (file, plan) = inputs.plan(input)?;
    let v = verify_kstable(&file.system, file.single_init()?, &file.goal, &plan, k)?;
    let mut r = stability_report("verify-k", &file, &v);
    r.field("k", json!(k));
    Ok(r)
}

fn synthesis_report(cmd: &str, file: &SystemFile, s: &Synthesis) -> Report {
    match s {
        Synthesis::Found(plan) => {
            let mut r = Report::new(cmd, "FOUND", EXIT_OK);
            r.line(format!("length: {}", plan.len()));
            r.text_block("plan", &serialize_plan(&file.system, plan));
            r
        }
        Synthesis::NotFound => Report::new(cmd, "NOT_FOUND", EXIT_NEGATIVE),
    }
}

pub fn synth_k(
    inputs: &mut Inputs,
    arg: &SystemArg,
    k: usize,
    max_len: Option<usize>,
    window_budget: u128,
) -> Result<Report> {
    let file = inputs.system(arg)?;
    let opts = WindowOptions {
        max_len,
        window_budget,
        ..WindowOptions::default()
    };
    let s = sjpa_with(&file.system, file.single_init()?, &file.goal, k, &opts)?;
    let mut r = synthesis_report("synth-k", &file, &s);
    r.field("k", json!(k));
    Ok(r)
}

pub fn synth_exact(
    inputs: &mut Inputs,
    arg: &SystemArg,
    max_len: Option<usize>,
    node_budget: u64,
    time_budget_ms: Option<u64>,
) -> Result<Report> {
    let file = inputs.system(arg)?;
    let budget = SynthBudget {
        max_len,
        node_budget,
        time_budget: time_budget_ms.map(Duration::from_millis),
    };
    let (result, stats) = sjpp_search(&file.system, file.single_init()?, &file.goal, &budget);
    let mut r = match result {
        Ok(s) => synthesis_report("synth-exact", &file, &s),
        Err(e) => Report::error("synth-exact", &e),
    };
    r.line(format!("nodes: {}", stats.nodes));
    r.line(format!("depth: {}", stats.depth));
    r.field(
        "search",
        json!({"nodes": stats.nodes, "candidates": stats.candidates, "depth": stats.depth}),
    );
    Ok(r)
}

fn ii_efficiency(
    cmd: &str,
    file: &SystemFile,
    c0s: &InitialSet,
    p1: &ConditionalPlanDag,
    p2: &ConditionalPlanDag,
) -> Result<Option<Report>> {
    match verify_ii_efficiency(&file.system, c0s, &file.goal, p1, p2)? {
        IiEfficiency::Efficient => Ok(None),
        IiEfficiency::Inefficient { c0, reason } => {
            let mut r = Report::new(cmd, "INEFFICIENT", EXIT_NEGATIVE);
            r.line(format!("initial: {}", file.system.show(c0)));
            r.line(format!("reason: {reason}"));
            r.field("initial", json!(file.system.show(c0)));
            r.field("reason", json!(reason.to_string()));
            Ok(Some(r))
        }
    }
}

pub fn verify_ii(inputs: &mut Inputs, input: &CondPlanArgs, agent: Option<u8>) -> Result<Report> {
    let (file, p1, p2) = inputs.cond_plans(input)?;
    let c0s = InitialSet::new(&file.system, file.init.clone())?;
    if let Some(r) = ii_efficiency("verify-ii", &file, &c0s, &p1, &p2)? {
        return Ok(r);
    }
    let mut verdict = StabilityVerdict::Stable;
    for dev in agent_arg(agent) {
        verdict = verify_ii_stability(&file.system, &c0s, &file.goal, &p1, &p2, dev)?;
        if !verdict.is_stable() {
            break;
        }
    }
    let mut r = stability_report("verify-ii", &file, &verdict);
    r.field("initial_configurations", json!(c0s.len()));
    Ok(r)
}

pub fn verify_crash(inputs: &mut Inputs, input: &CondPlanArgs) -> Result<Report> {
    let (file, p1, p2) = inputs.cond_plans(input)?;
    let c0s = InitialSet::new(&file.system, file.init.clone())?;
    if let Some(r) = ii_efficiency("verify-crash", &file, &c0s, &p1, &p2)? {
        return Ok(r);
    }
    let v = verify_crash_stability(&file.system, &c0s, &file.goal, &p1, &p2)?;
    Ok(stability_report("verify-crash", &file, &v))
}

fn parse_assignment(text: &str) -> Result<Assignment> {
    let mut out = BTreeMap::new();
    for tok in text.split([',', ' ']).filter(|t| !t.is_empty()) {
        let lit: i64 = tok
            .parse()
            .map_err(|_| Error::Invalid(format!("bad literal `{tok}` in assignment")))?;
        if lit == 0 {
            return Err(Error::Invalid("literal 0 in assignment".into()));
        }
        out.insert(lit.unsigned_abs() as usize, lit > 0);
    }
    Ok(out)
}

fn generated(cmd: &str, file: SystemFile) -> Report {
    let mut r = Report::new(cmd, "GENERATED", EXIT_OK);
    r.field("configurations", json!(file.system.num_configs()));
    r.text_block("system", &serialize_system(&file));
    r
}

pub fn gen_3sat(
    inputs: &mut Inputs,
    cnf_path: &Path,
    assignment: Option<&str>,
    plan_out: Option<&Path>,
) -> Result<Report> {
    let cnf = parse_dimacs(&inputs.read(Some(cnf_path))?)?;
    let inst = reduce_3sat(&cnf);
    if let (Some(a), Some(out)) = (assignment, plan_out) {
        let plan = assignment_to_plan(&cnf, &parse_assignment(a)?)?;
        write_file(out, &serialize_plan(&inst.system, &plan))?;
    }
    let mut r = generated("gen-3sat", inst.into());
    r.field("variables", json!(cnf.num_vars()));
    r.field("clauses", json!(cnf.num_clauses()));
    Ok(r)
}

pub fn gen_grid_cmd(rows: usize, cols: usize, cells: [(usize, usize); 4]) -> Result<Report> {
    let [s1, s2, g1, g2] = cells;
    Ok(generated(
        "gen-grid",
        gen_grid(rows, cols, s1, s2, g1, g2)?.into(),
    ))
}

pub fn gen_random_cmd(
    seed: u64,
    sizes: &RandomSizes,
    plan_len: Option<usize>,
    plan_out: Option<&Path>,
) -> Result<Report> {
    let inst = match (plan_len, plan_out) {
        (Some(len), Some(out)) => {
            let (inst, plan) = gen_random_with_plan(seed, sizes, len)?;
            write_file(out, &serialize_plan(&inst.system, &plan))?;
            inst
        }
        _ => gen_random(seed, sizes)?,
    };
    let mut r = generated("gen-random", inst.into());
    r.field("seed", json!(seed));
    Ok(r)
}

pub fn simulate(inputs: &mut Inputs, input: &PlanArgs, deviate: Option<&str>) -> Result<Report> {
    let (file, plan) = inputs.plan(input)?;
    let (sys, c0) = (&file.system, file.single_init()?);
    let mut seqs = [
        plan.actions(Agent::One).to_vec(),
        plan.actions(Agent::Two).to_vec(),
    ];
    let mut deviators = Vec::new();
    for spec in deviate
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        let bad = || {
            Error::Invalid(format!(
                "bad deviation `{spec}`; expected <agent>@<step>:<action>"
            ))
        };
        let (who, rest) = spec.split_once('@').ok_or_else(bad)?;
        let (step, action) = rest.split_once(':').ok_or_else(bad)?;
        let agent = who
            .trim()
            .parse::<u8>()
            .ok()
            .and_then(Agent::from_number)
            .ok_or_else(bad)?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step >= plan.len() {
            return Err(Error::OutOfRange {
                what: "deviation step",
                detail: format!("{step} with plan length {}", plan.len()),
            });
        }
        seqs[agent.index()][step] = sys.require_action(agent, action.trim())?;
        deviators.push(agent);
    }
    let [one, two] = seqs;
    let actual = JointOpenPlan::new(one, two)?;
    let honest = execute_open(sys, c0, &plan, None)?;
    let run = execute_open(sys, c0, &actual, Some(&file.goal))?;

    let mut r = match run.goal_visited {
        Some(k) => {
            let mut r = Report::new("simulate", "GOAL_REACHED", EXIT_OK);
            r.line(format!("goal: step {k}"));
            r
        }
        None => {
            let mut r = Report::new("simulate", "GOAL_MISSED", EXIT_NEGATIVE);
            r.line("goal: never");
            r
        }
    };
    r.field("goal_step", json!(run.goal_visited));
    r.line(format!(
        "trajectory: {}",
        show_configs(sys, &run.configs).join(" ")
    ));
    r.field("trajectory", json!(show_configs(sys, &run.configs)));
    let mut detections = serde_json::Map::new();
    for agent in Agent::BOTH {
        if deviators.contains(&agent) {
            continue;
        }
        let at = run
            .states(agent)
            .zip(honest.states(agent))
            .position(|(a, b)| a != b);
        match at {
            Some(u) => r.line(format!("agent {} detects at step {u}", agent.number())),
            None => r.line(format!("agent {} detects nothing", agent.number())),
        };
        detections.insert(agent.number().to_string(), json!(at));
    }
    r.field("detection", serde_json::Value::Object(detections));
    Ok(r)
}

pub fn monitor(
    inputs: &mut Inputs,
    input: &CondPlanArgs,
    detector: u8,
    observations: Option<&str>,
) -> Result<Report> {
    let (file, p1, p2) = inputs.cond_plans(input)?;
    let c0s = InitialSet::new(&file.system, file.init.clone())?;
    let detector = Agent::from_number(detector).expect("validated by argument parser");
    let mut m = DetectionMonitor::new(&file.system, &c0s, &p1, &p2, detector)?;
    let text = match observations {
        Some(s) if s != "-" => s.to_string(),
        _ => inputs.read_stdin()?,
    };
    let mut last = None;
    for obs in text
        .split([',', ' ', '\n', '\t'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        last = Some(m.observe_named(obs)?);
    }
    let mut r = match last {
        Some(MonitorEvent::Detected { step }) => {
            let mut r = Report::new("monitor", "DETECTED", EXIT_NEGATIVE);
            r.line(format!("detected at step {step}"));
            r.field("step", json!(step));
            r
        }
        _ => {
            let mut r = Report::new("monitor", "CONSISTENT", EXIT_OK);
            let alive = show_configs(&file.system, &m.consistent().collect::<Vec<_>>());
            r.line(format!("consistent with: {}", alive.join(" ")));
            r.field("consistent", json!(alive));
            r
        }
    };
    r.field("observations", json!(m.steps()));
    Ok(r)
}
