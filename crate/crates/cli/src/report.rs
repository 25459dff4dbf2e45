use std::time::Duration;

use serde_json::{json, Map, Value};
use stable_plans::model::{Agent, Config, JointOpenPlan, SystemModel};
use stable_plans::stability::{Counterexample, Instability, StabilityVerdict};
use stable_plans::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

/// What the process prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

/// A verdict with its supporting detail, rendered as text or JSON.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    verdict: &'static str,
    code: i32,
    lines: Vec<String>,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, verdict: &'static str, code: i32) -> Self {
        Report {
            command: command.to_string(),
            verdict,
            code,
            lines: Vec::new(),
            fields: Map::new(),
        }
    }

    pub fn error(command: &str, err: &Error) -> Self {
        let (verdict, code) = match err {
            Error::BudgetExceeded { .. } | Error::WindowExplosion { .. } => {
                ("BUDGET_EXCEEDED", EXIT_BUDGET)
            }
            _ => ("ERROR", EXIT_ERROR),
        };
        let mut r = Report::new(command, verdict, code);
        r.line(format!("error: {err}"));
        r.field("error", json!(err.to_string()));
        r
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.lines.push(s.into());
        self
    }

    pub fn field(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.insert(key.to_string(), value);
        self
    }

    /// Adds a block of raw text (a generated system or plan) to the text
    /// output and the given JSON field.
    pub fn text_block(&mut self, key: &str, text: &str) -> &mut Self {
        self.lines.extend(text.lines().map(str::to_string));
        self.field(key, json!(text))
    }

    pub fn counterexample(&mut self, system: &SystemModel, cex: &Counterexample) -> &mut Self {
        self.counterexample_as("counterexample", system, cex)
    }

    pub fn counterexample_as(
        &mut self,
        key: &str,
        system: &SystemModel,
        cex: &Counterexample,
    ) -> &mut Self {
        self.lines.extend(counterexample_lines(system, cex));
        self.field(key, counterexample_json(system, cex))
    }

    /// Records a stability verdict's reason or counterexample.
    pub fn verdict_detail(&mut self, system: &SystemModel, v: &StabilityVerdict) -> &mut Self {
        match v {
            StabilityVerdict::Stable => {}
            StabilityVerdict::Unstable(Instability::NotEfficient(why)) => {
                self.line(format!("reason: not efficient ({why})"));
                self.field("reason", json!(format!("not efficient ({why})")));
            }
            StabilityVerdict::Unstable(Instability::Undetected(cex)) => {
                self.line("reason: undetected deviation");
                self.field("reason", json!("undetected deviation"));
                self.counterexample(system, cex);
            }
        }
        self
    }

    pub fn render(self, json_output: bool, elapsed: Duration) -> Outcome {
        let ms = elapsed.as_secs_f64() * 1e3;
        let mut output = format!("verdict: {}\n", self.verdict);
        if json_output {
            let mut doc = Map::new();
            doc.insert("format".into(), json!(1));
            doc.insert("command".into(), json!(self.command));
            doc.insert("verdict".into(), json!(self.verdict));
            doc.insert("exit_code".into(), json!(self.code));
            doc.insert("time_ms".into(), json!(ms));
            doc.entry("counterexample").or_insert(Value::Null);
            for (k, v) in self.fields {
                doc.insert(k, v);
            }
            output.push_str(&serde_json::to_string_pretty(&Value::Object(doc)).expect("json"));
            output.push('\n');
        } else {
            for l in &self.lines {
                output.push_str(l);
                output.push('\n');
            }
            output.push_str(&format!("# time: {ms:.3} ms\n"));
        }
        Outcome {
            code: self.code,
            output,
        }
    }
}

pub fn show_actions(system: &SystemModel, plan: &JointOpenPlan, agent: Agent) -> Vec<String> {
    plan.actions(agent)
        .iter()
        .map(|&a| system.action_name(agent, a).to_string())
        .collect()
}

pub fn show_configs(system: &SystemModel, configs: &[Config]) -> Vec<String> {
    configs.iter().map(|&c| system.show(c)).collect()
}

fn counterexample_lines(system: &SystemModel, cex: &Counterexample) -> Vec<String> {
    let mut out = vec![
        "counterexample:".to_string(),
        format!("  deviator: agent {}", cex.deviator.number()),
        format!("  initial: {}", system.show(cex.c0)),
    ];
    if let Some(w) = cex.witness {
        out.push(format!("  witness: {}", system.show(w.witness)));
    }
    out.push(format!("  deviation step: {}", cex.deviation_step));
    for agent in Agent::BOTH {
        out.push(format!(
            "  agent{}: {}",
            agent.number(),
            show_actions(system, &cex.actions, agent).join(" ")
        ));
    }
    out.push(format!(
        "  trajectory: {}",
        show_configs(system, &cex.trajectory.configs).join(" ")
    ));
    out
}

fn counterexample_json(system: &SystemModel, cex: &Counterexample) -> Value {
    json!({
        "deviator": cex.deviator.number(),
        "initial": system.show(cex.c0),
        "witness": cex.witness.map(|w| system.show(w.witness)),
        "deviation_step": cex.deviation_step,
        "agent1": show_actions(system, &cex.actions, Agent::One),
        "agent2": show_actions(system, &cex.actions, Agent::Two),
        "trajectory": show_configs(system, &cex.trajectory.configs),
    })
}
