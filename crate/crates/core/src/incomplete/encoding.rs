use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::dag::{ConditionalPlanDag, NodeId, PlanNode};
use crate::error::{Error, Result};
use crate::model::{Agent, SystemModel};

/// Canonical text form of a conditional plan:
///
/// ```text
/// root 0
/// node 0: action go; on ua -> 1; on * -> 2
/// node 1: halt
/// ```
///
/// The plan is canonicalized first, so equal subplans appear once and the
/// text grows with the number of distinct nodes, not paths.
pub fn encode_cplan(system: &SystemModel, agent: Agent, dag: &ConditionalPlanDag) -> String {
    let dag = dag.canonicalize();
    let mut out = format!("root {}\n", dag.root().0);
    for (i, node) in dag.nodes().iter().enumerate() {
        match node {
            PlanNode::Halt => {
                let _ = writeln!(out, "node {i}: halt");
            }
            PlanNode::Act {
                action,
                branches,
                default,
            } => {
                let _ = write!(
                    out,
                    "node {i}: action {}",
                    system.action_name(agent, *action)
                );
                for (s, n) in branches {
                    let _ = write!(out, "; on {} -> {}", system.state_name(agent, *s), n.0);
                }
                if let Some(n) = default {
                    let _ = write!(out, "; on * -> {}", n.0);
                }
                out.push('\n');
            }
        }
    }
    out
}

enum RawNode {
    Halt,
    Act {
        action: String,
        branches: Vec<(String, String)>,
        default: Option<String>,
    },
}

/// Parses the text form. Node ids may be any tokens; nodes keep their
/// declaration order. `#` starts a comment; `verdict:` lines are skipped.
pub fn decode_cplan(system: &SystemModel, agent: Agent, text: &str) -> Result<ConditionalPlanDag> {
    let malformed = |line: usize, message: String| Error::MalformedEncoding { line, message };
    let mut root: Option<(usize, String)> = None;
    let mut raw: Vec<(usize, String, RawNode)> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();

    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with("verdict:") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("root ") {
            if root.is_some() {
                return Err(malformed(ln, "duplicate `root` line".into()));
            }
            root = Some((ln, rest.trim().to_string()));
            continue;
        }
        let Some(rest) = line.strip_prefix("node ") else {
            return Err(malformed(
                ln,
                format!("expected `root` or `node`, found `{line}`"),
            ));
        };
        let (id, body) = rest
            .split_once(':')
            .ok_or_else(|| malformed(ln, "missing `:` after node id".into()))?;
        let id = id.trim().to_string();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(malformed(ln, format!("bad node id `{id}`")));
        }
        if ids.insert(id.clone(), raw.len()).is_some() {
            return Err(malformed(ln, format!("node `{id}` declared twice")));
        }
        let mut parts = body.split(';').map(str::trim);
        let head = parts.next().unwrap_or("");
        let node = if head == "halt" {
            if parts.next().is_some() {
                return Err(malformed(ln, "halt node takes no branches".into()));
            }
            RawNode::Halt
        } else if let Some(action) = head.strip_prefix("action ") {
            let mut branches = Vec::new();
            let mut default = None;
            for part in parts {
                let spec = part
                    .strip_prefix("on ")
                    .and_then(|p| p.split_once("->"))
                    .ok_or_else(|| {
                        malformed(ln, format!("expected `on <state> -> <id>`, found `{part}`"))
                    })?;
                let (state, target) = (spec.0.trim().to_string(), spec.1.trim().to_string());
                if state == "*" {
                    if default.replace(target).is_some() {
                        return Err(malformed(ln, "two `on *` branches".into()));
                    }
                } else {
                    if branches.iter().any(|(s, _)| *s == state) {
                        return Err(malformed(ln, format!("two branches for state `{state}`")));
                    }
                    branches.push((state, target));
                }
            }
            RawNode::Act {
                action: action.trim().to_string(),
                branches,
                default,
            }
        } else {
            return Err(malformed(
                ln,
                format!("expected `action <a>` or `halt`, found `{head}`"),
            ));
        };
        raw.push((ln, id, node));
    }

    let (root_line, root_id) = root.ok_or_else(|| malformed(0, "missing `root` line".into()))?;
    let resolve = |line: usize, id: &str| {
        ids.get(id)
            .map(|&i| NodeId(i))
            .ok_or_else(|| Error::DanglingNodeRef {
                line,
                node: id.to_string(),
            })
    };
    let root = resolve(root_line, &root_id)?;
    let mut nodes = Vec::with_capacity(raw.len());
    for (ln, _, node) in &raw {
        nodes.push(match node {
            RawNode::Halt => PlanNode::Halt,
            RawNode::Act {
                action,
                branches,
                default,
            } => {
                let action = system
                    .require_action(agent, action)
                    .map_err(|e| malformed(*ln, e.to_string()))?;
                let mut map = BTreeMap::new();
                for (state, target) in branches {
                    let s = system
                        .require_state(agent, state)
                        .map_err(|e| malformed(*ln, e.to_string()))?;
                    map.insert(s, resolve(*ln, target)?);
                }
                let default = default.as_deref().map(|t| resolve(*ln, t)).transpose()?;
                PlanNode::Act {
                    action,
                    branches: map,
                    default,
                }
            }
        });
    }
    ConditionalPlanDag::new(nodes, root).map_err(|e| malformed(0, e.to_string()))
}
