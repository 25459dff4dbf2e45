use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use super::window::window_deviation_check;
use crate::error::{Error, Result};
use crate::model::{is_goal, Agent, Config, GoalSet, JointAction, SystemModel};

/// Limits for window-graph construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowOptions {
    /// Longest plan considered; defaults to `|C|`. Values above `|C|` are
    /// clamped, since longer plans are never efficient.
    pub max_len: Option<usize>,
    /// Upper bound on `(|A1| * |A2|)^(k+1)`, the number of candidate windows
    /// per configuration.
    pub window_budget: u128,
    /// Upper bound on the number of graph nodes.
    pub node_budget: usize,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions {
            max_len: None,
            window_budget: 1_000_000,
            node_budget: 5_000_000,
        }
    }
}

impl WindowOptions {
    pub fn effective_max_len(&self, system: &SystemModel) -> usize {
        let bound = system.num_configs();
        self.max_len.map_or(bound, |l| l.min(bound))
    }
}

/// A time-stamped configuration together with the joint actions planned
/// from it.
///
/// Windows have `k + 1` actions, except near the end of a plan, where the
/// window is cut at the plan's last step (lengths `1..=k`). A shortened
/// window at time `τ` with `l` actions stands for a plan of total length
/// `τ + l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowNode {
    pub time: usize,
    pub config: Config,
    pub window: Vec<JointAction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowEdge {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct WindowGraph {
    pub k: usize,
    pub max_len: usize,
    pub nodes: Vec<WindowNode>,
    pub edges: Vec<WindowEdge>,
    /// Deviations from the node's first joint action are detected within
    /// its window, for both deviators.
    pub detectable: Vec<bool>,
    /// The node's first joint action leads into the goal.
    pub reaches_goal: Vec<bool>,
    succ: Vec<Vec<usize>>,
}

impl WindowGraph {
    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn find(&self, time: usize, config: Config, window: &[JointAction]) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| n.time == time && n.config == config && n.window == window)
    }

    pub fn is_full(&self, node: usize) -> bool {
        self.nodes[node].window.len() == self.k + 1
    }
}

/// All windows of `len` joint actions that stay available along their own
/// induced run from `c`, in declared action order.
fn feasible_windows(system: &SystemModel, c: Config, len: usize) -> Result<Vec<Vec<JointAction>>> {
    fn go(
        system: &SystemModel,
        c: Config,
        len: usize,
        prefix: &mut Vec<JointAction>,
        out: &mut Vec<Vec<JointAction>>,
    ) -> Result<()> {
        if prefix.len() == len {
            out.push(prefix.clone());
            return Ok(());
        }
        for &a1 in system.available(Agent::One, c.s1) {
            for &a2 in system.available(Agent::Two, c.s2) {
                let next = system.step(c, a1, a2)?;
                prefix.push((a1, a2));
                go(system, next, len, prefix, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(system, c, len, &mut Vec::with_capacity(len), &mut out)?;
    Ok(out)
}

pub fn build_window_graph(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    k: usize,
) -> Result<WindowGraph> {
    build_window_graph_with(system, c0, goal, k, &WindowOptions::default())
}

pub fn build_window_graph_with(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    k: usize,
    opts: &WindowOptions,
) -> Result<WindowGraph> {
    let per_step = (system.num_actions(Agent::One) * system.num_actions(Agent::Two)) as u128;
    let windows_per_config = u32::try_from(k + 1)
        .ok()
        .and_then(|e| per_step.checked_pow(e))
        .unwrap_or(u128::MAX);
    if windows_per_config > opts.window_budget {
        return Err(Error::WindowExplosion {
            size: windows_per_config,
            budget: opts.window_budget,
        });
    }
    let max_len = opts.effective_max_len(system);

    let mut windows: HashMap<(Config, usize), Vec<Vec<JointAction>>> = HashMap::new();
    let mut detectable_memo: HashMap<(Config, Vec<JointAction>), bool> = HashMap::new();

    let mut nodes: Vec<WindowNode> = Vec::new();
    let mut detectable = Vec::new();
    let mut reaches_goal = Vec::new();
    let mut index: HashMap<(usize, Config, Vec<JointAction>), usize> = HashMap::new();
    // full nodes keyed by (time, config, first k actions)
    let mut by_prefix: HashMap<(usize, Config, Vec<JointAction>), Vec<usize>> = HashMap::new();

    let mut layer: Vec<Config> = vec![c0];
    for time in 0..max_len {
        let mut next_layer: HashSet<Config> = HashSet::new();
        for &c in &layer {
            let lengths = (1..=k + 1).filter(|&l| time + l <= max_len);
            for len in lengths {
                if let Entry::Vacant(slot) = windows.entry((c, len)) {
                    slot.insert(feasible_windows(system, c, len)?);
                }
                for w in &windows[&(c, len)] {
                    let ok = match detectable_memo.get(&(c, w.clone())) {
                        Some(&ok) => ok,
                        None => {
                            let ok = window_deviation_check(system, c, w, Agent::One)?
                                && window_deviation_check(system, c, w, Agent::Two)?;
                            detectable_memo.insert((c, w.clone()), ok);
                            ok
                        }
                    };
                    let first = system.step(c, w[0].0, w[0].1)?;
                    next_layer.insert(first);
                    let id = nodes.len();
                    if id >= opts.node_budget {
                        return Err(Error::WindowExplosion {
                            size: id as u128 + 1,
                            budget: opts.node_budget as u128,
                        });
                    }
                    nodes.push(WindowNode {
                        time,
                        config: c,
                        window: w.clone(),
                    });
                    detectable.push(ok);
                    reaches_goal.push(is_goal(goal, first));
                    index.insert((time, c, w.clone()), id);
                    if len == k + 1 {
                        by_prefix
                            .entry((time, c, w[..k].to_vec()))
                            .or_default()
                            .push(id);
                    }
                }
            }
        }
        let mut sorted: Vec<Config> = next_layer.into_iter().collect();
        sorted.sort();
        layer = sorted;
    }

    let mut succ = vec![Vec::new(); nodes.len()];
    let mut edges = Vec::new();
    for (id, n) in nodes.iter().enumerate() {
        if !detectable[id] {
            continue;
        }
        let next = system.step(n.config, n.window[0].0, n.window[0].1)?;
        let rest = &n.window[1..];
        let mut targets = Vec::new();
        if n.window.len() == k + 1 {
            if let Some(full) = by_prefix.get(&(n.time + 1, next, rest.to_vec())) {
                targets.extend(full.iter().copied());
            }
        }
        if !rest.is_empty() {
            if let Some(&short) = index.get(&(n.time + 1, next, rest.to_vec())) {
                targets.push(short);
            }
        }
        for to in targets {
            succ[id].push(to);
            edges.push(WindowEdge { from: id, to });
        }
    }

    Ok(WindowGraph {
        k,
        max_len,
        nodes,
        edges,
        detectable,
        reaches_goal,
        succ,
    })
}
