//! Line-oriented text formats for systems and open plans.
//!
//! System files:
//!
//! ```text
//! # comment
//! agent1 states: u0 u1
//! agent2 states: v0 v1
//! env states: e
//! agent1 actions: go
//! agent2 actions: good bad
//! avail1 u0: go
//! avail2 v0: good bad
//! trans u0 v0 e go good -> u1 v1 e
//! init u0 v0 e
//! goal u1 v1 *
//! ```
//!
//! Lines starting with `verdict:` are report headers emitted by the CLI and
//! are skipped, so generator output can be piped straight back in.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    ActionId, Agent, Config, GoalPattern, GoalSet, JointAction, JointOpenPlan, SystemModel,
};

/// A parsed system file: model, possible initial configurations and goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub system: SystemModel,
    pub init: Vec<Config>,
    pub goal: GoalSet,
}

impl SystemFile {
    /// The unique initial configuration, or an error when `init` lists zero or
    /// several.
    pub fn single_init(&self) -> Result<Config> {
        match self.init[..] {
            [c] => Ok(c),
            [] => Err(Error::Invalid("system file has no `init` line".into())),
            _ => Err(Error::Invalid(format!(
                "expected one `init` line, found {}",
                self.init.len()
            ))),
        }
    }
}

enum Stmt<'a> {
    States(Agent, Vec<&'a str>),
    Env(Vec<&'a str>),
    Actions(Agent, Vec<&'a str>),
    Avail(Agent, &'a str, Vec<&'a str>),
    Trans([&'a str; 3], [&'a str; 2], [&'a str; 3]),
    Init([&'a str; 3]),
    Goal([&'a str; 3]),
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn tokens(s: &str) -> Vec<&str> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .collect()
}

fn triple<'a>(line: usize, toks: &[&'a str], what: &str) -> Result<[&'a str; 3]> {
    <[&str; 3]>::try_from(toks).map_err(|_| {
        parse_err(
            line,
            format!("{what} needs 3 components, found {}", toks.len()),
        )
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn parse_stmt(line_no: usize, line: &str) -> Result<Option<Stmt<'_>>> {
    let line = strip_comment(line);
    if line.is_empty() || line.starts_with("verdict:") {
        return Ok(None);
    }
    let decl = |prefix: &str| line.strip_prefix(prefix).map(tokens);
    if let Some(t) = decl("agent1 states:") {
        return Ok(Some(Stmt::States(Agent::One, t)));
    }
    if let Some(t) = decl("agent2 states:") {
        return Ok(Some(Stmt::States(Agent::Two, t)));
    }
    if let Some(t) = decl("env states:") {
        return Ok(Some(Stmt::Env(t)));
    }
    if let Some(t) = decl("agent1 actions:") {
        return Ok(Some(Stmt::Actions(Agent::One, t)));
    }
    if let Some(t) = decl("agent2 actions:") {
        return Ok(Some(Stmt::Actions(Agent::Two, t)));
    }
    let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    match head {
        "avail1" | "avail2" => {
            let agent = if head == "avail1" {
                Agent::One
            } else {
                Agent::Two
            };
            let (state, actions) = rest
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, "expected `availN <state>: <actions>`"))?;
            let state = state.trim();
            if state.is_empty() || state.contains(char::is_whitespace) {
                return Err(parse_err(line_no, "expected a single state before `:`"));
            }
            Ok(Some(Stmt::Avail(agent, state, tokens(actions))))
        }
        "trans" => {
            let (lhs, rhs) = rest
                .split_once("->")
                .ok_or_else(|| parse_err(line_no, "expected `->` in transition"))?;
            let lhs = tokens(lhs);
            if lhs.len() != 5 {
                return Err(parse_err(
                    line_no,
                    format!(
                        "transition needs `s1 s2 b a1 a2`, found {} tokens",
                        lhs.len()
                    ),
                ));
            }
            let from = [lhs[0], lhs[1], lhs[2]];
            let acts = [lhs[3], lhs[4]];
            let to = triple(line_no, &tokens(rhs), "transition target")?;
            Ok(Some(Stmt::Trans(from, acts, to)))
        }
        "init" => Ok(Some(Stmt::Init(triple(line_no, &tokens(rest), "init")?))),
        "goal" => Ok(Some(Stmt::Goal(triple(line_no, &tokens(rest), "goal")?))),
        _ => Err(parse_err(
            line_no,
            format!("unrecognised statement `{head}`"),
        )),
    }
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_err(line, other.to_string()),
    })
}

/// Parse and validate a system file. Any model defect is an error.
pub fn parse_system(text: &str) -> Result<SystemFile> {
    let file = parse_system_unchecked(text)?;
    let defects = file.system.validate();
    if !defects.is_empty() {
        return Err(Error::Model(defects));
    }
    Ok(file)
}

/// Parse a system file without running `validate`. Conflicting transition
/// lines are still rejected here, since the line numbers are only known now.
pub fn parse_system_unchecked(text: &str) -> Result<SystemFile> {
    let mut stmts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(s) = parse_stmt(i + 1, line)? {
            stmts.push((i + 1, s));
        }
    }

    let mut states: [Vec<String>; 2] = Default::default();
    let mut env = Vec::new();
    let mut actions: [Vec<String>; 2] = Default::default();
    for (_, s) in &stmts {
        match s {
            Stmt::States(a, t) => states[a.index()].extend(t.iter().map(|s| s.to_string())),
            Stmt::Env(t) => env.extend(t.iter().map(|s| s.to_string())),
            Stmt::Actions(a, t) => actions[a.index()].extend(t.iter().map(|s| s.to_string())),
            _ => {}
        }
    }
    let [states1, states2] = states;
    let [actions1, actions2] = actions;
    let mut system = at_line(
        0,
        SystemModel::new(states1, states2, env, actions1, actions2),
    )?;

    let mut seen: HashMap<(Config, JointAction), (Config, usize)> = HashMap::new();
    let mut init = Vec::new();
    let mut goal = GoalSet::default();
    for (line, s) in stmts {
        match s {
            Stmt::Avail(agent, state, acts) => {
                let st = at_line(line, system.require_state(agent, state))?;
                let mut ids = system.available(agent, st).to_vec();
                for a in acts {
                    ids.push(at_line(line, system.require_action(agent, a))?);
                }
                system.set_available(agent, st, &ids);
            }
            Stmt::Trans(from, acts, to) => {
                let from = at_line(line, system.config_named(from[0], from[1], from[2]))?;
                let a1 = at_line(line, system.require_action(Agent::One, acts[0]))?;
                let a2 = at_line(line, system.require_action(Agent::Two, acts[1]))?;
                let to = at_line(line, system.config_named(to[0], to[1], to[2]))?;
                if let Some(&(prev, prev_line)) = seen.get(&(from, (a1, a2))) {
                    if prev != to {
                        return Err(parse_err(
                            line,
                            format!(
                                "conflicting transition for {}+{}: {} here, {} on line {}",
                                system.show(from),
                                system.show_joint((a1, a2)),
                                system.show(to),
                                system.show(prev),
                                prev_line
                            ),
                        ));
                    }
                    continue;
                }
                seen.insert((from, (a1, a2)), (to, line));
                system.insert_transition(from, a1, a2, to);
            }
            Stmt::Init(c) => {
                let c = at_line(line, system.config_named(c[0], c[1], c[2]))?;
                if !init.contains(&c) {
                    init.push(c);
                }
            }
            Stmt::Goal(p) => goal.push(at_line(
                line,
                GoalSet::pattern_named(&system, p[0], p[1], p[2]),
            )?),
            _ => {}
        }
    }
    Ok(SystemFile { system, init, goal })
}

fn show_pattern(system: &SystemModel, p: &GoalPattern) -> String {
    let s1 = p.s1.map_or("*", |s| system.state_name(Agent::One, s));
    let s2 = p.s2.map_or("*", |s| system.state_name(Agent::Two, s));
    let b = p.b.map_or("*", |b| system.env_name(b));
    format!("{s1} {s2} {b}")
}

/// Canonical text form: declarations, availability, transitions in table
/// order, then `init` and `goal` lines.
pub fn serialize_system(file: &SystemFile) -> String {
    let sys = &file.system;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "agent1 states: {}",
        sys.state_names(Agent::One).join(" ")
    );
    let _ = writeln!(
        out,
        "agent2 states: {}",
        sys.state_names(Agent::Two).join(" ")
    );
    let _ = writeln!(out, "env states: {}", sys.env_names().join(" "));
    let _ = writeln!(
        out,
        "agent1 actions: {}",
        sys.action_names(Agent::One).join(" ")
    );
    let _ = writeln!(
        out,
        "agent2 actions: {}",
        sys.action_names(Agent::Two).join(" ")
    );
    for agent in Agent::BOTH {
        for (i, name) in sys.state_names(agent).iter().enumerate() {
            let acts: Vec<&str> = sys
                .available(agent, crate::model::StateId(i as u32))
                .iter()
                .map(|&a| sys.action_name(agent, a))
                .collect();
            let _ = writeln!(out, "avail{} {}: {}", agent.number(), name, acts.join(" "));
        }
    }
    for (from, (a1, a2), to) in sys.transitions() {
        let _ = writeln!(
            out,
            "trans {} {} {} {} {} -> {} {} {}",
            sys.state_name(Agent::One, from.s1),
            sys.state_name(Agent::Two, from.s2),
            sys.env_name(from.b),
            sys.action_name(Agent::One, a1),
            sys.action_name(Agent::Two, a2),
            sys.state_name(Agent::One, to.s1),
            sys.state_name(Agent::Two, to.s2),
            sys.env_name(to.b),
        );
    }
    for &c in &file.init {
        let _ = writeln!(
            out,
            "init {} {} {}",
            sys.state_name(Agent::One, c.s1),
            sys.state_name(Agent::Two, c.s2),
            sys.env_name(c.b)
        );
    }
    for p in &file.goal.patterns {
        let _ = writeln!(out, "goal {}", show_pattern(sys, p));
    }
    out
}

/// Parse an open plan: `agent1: a b c` and `agent2: x y z`.
pub fn parse_plan(system: &SystemModel, text: &str) -> Result<JointOpenPlan> {
    let mut seqs: [Option<Vec<ActionId>>; 2] = [None, None];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(line);
        if line.is_empty() || line.starts_with("verdict:") {
            continue;
        }
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(line_no, "expected `agent1:` or `agent2:`"))?;
        let agent = match head.trim() {
            "agent1" => Agent::One,
            "agent2" => Agent::Two,
            other => return Err(parse_err(line_no, format!("unknown plan line `{other}`"))),
        };
        if seqs[agent.index()].is_some() {
            return Err(parse_err(
                line_no,
                format!("duplicate plan for agent {agent}"),
            ));
        }
        let ids = tokens(rest)
            .into_iter()
            .map(|a| at_line(line_no, system.require_action(agent, a)))
            .collect::<Result<Vec<_>>>()?;
        seqs[agent.index()] = Some(ids);
    }
    let [one, two] = seqs;
    let one = one.ok_or_else(|| parse_err(0, "missing `agent1:` line"))?;
    let two = two.ok_or_else(|| parse_err(0, "missing `agent2:` line"))?;
    JointOpenPlan::new(one, two)
}

pub fn serialize_plan(system: &SystemModel, plan: &JointOpenPlan) -> String {
    plan.show(system)
}
