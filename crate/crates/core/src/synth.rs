//! Exact stable-plan synthesis by exhaustive search.
//!
//! Iterative deepening over plan length, depth-first over available joint
//! actions in declared order, each complete candidate checked with
//! [`verify_stable`]. Exponential in the plan length, which is expected:
//! deciding whether a stable plan exists is NP-complete.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{Agent, Config, GoalSet, JointOpenPlan, SystemModel};
use crate::stability::verify_stable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Synthesis {
    Found(JointOpenPlan),
    NotFound,
}

impl Synthesis {
    pub fn plan(&self) -> Option<&JointOpenPlan> {
        match self {
            Synthesis::Found(p) => Some(p),
            Synthesis::NotFound => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Synthesis::Found(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthBudget {
    /// Longest plan tried; `None` means `|C|`.
    pub max_len: Option<usize>,
    pub node_budget: u64,
    pub time_budget: Option<Duration>,
}

impl Default for SynthBudget {
    fn default() -> Self {
        SynthBudget {
            max_len: None,
            node_budget: 10_000_000,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search-tree nodes expanded, over all deepening rounds.
    pub nodes: u64,
    /// Complete candidates handed to the verifier.
    pub candidates: u64,
    /// Deepest plan length fully explored or reached.
    pub depth: usize,
}

struct Dfs<'a> {
    system: &'a SystemModel,
    c0: Config,
    goal: &'a GoalSet,
    budget: SynthBudget,
    started: Instant,
    stats: SearchStats,
    prefix: JointOpenPlan,
}

impl Dfs<'_> {
    fn tick(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget.node_budget {
            return Err(Error::BudgetExceeded {
                nodes: self.stats.nodes,
            });
        }
        if let Some(limit) = self.budget.time_budget {
            if self.stats.nodes.is_multiple_of(1024) && self.started.elapsed() > limit {
                return Err(Error::BudgetExceeded {
                    nodes: self.stats.nodes,
                });
            }
        }
        Ok(())
    }

    fn search(&mut self, c: Config, remaining: usize) -> Result<bool> {
        self.tick()?;
        if remaining == 0 {
            self.stats.candidates += 1;
            return Ok(verify_stable(self.system, self.c0, self.goal, &self.prefix)?.is_stable());
        }
        for &a1 in self.system.available(Agent::One, c.s1) {
            for &a2 in self.system.available(Agent::Two, c.s2) {
                let next = self.system.step(c, a1, a2)?;
                self.prefix.push((a1, a2));
                if self.search(next, remaining - 1)? {
                    return Ok(true);
                }
                self.prefix.pop();
            }
        }
        Ok(false)
    }
}

/// Runs the search and reports how much of the space it expanded, whatever
/// the outcome.
pub fn sjpp_search(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    budget: &SynthBudget,
) -> (Result<Synthesis>, SearchStats) {
    let max_len = budget.max_len.unwrap_or_else(|| system.num_configs());
    if max_len == 0 {
        return (
            Err(Error::Invalid(
                "maximum plan length must be at least 1".into(),
            )),
            SearchStats::default(),
        );
    }
    let mut dfs = Dfs {
        system,
        c0,
        goal,
        budget: *budget,
        started: Instant::now(),
        stats: SearchStats::default(),
        prefix: JointOpenPlan::default(),
    };
    for len in 1..=max_len {
        dfs.stats.depth = len;
        match dfs.search(c0, len) {
            Ok(true) => {
                let plan = std::mem::take(&mut dfs.prefix);
                return (Ok(Synthesis::Found(plan)), dfs.stats);
            }
            Ok(false) => {}
            Err(e) => return (Err(e), dfs.stats),
        }
    }
    (Ok(Synthesis::NotFound), dfs.stats)
}

/// Finds a shortest stable joint plan of length at most `budget.max_len`.
/// `NotFound` means the whole space up to that length was exhausted;
/// running out of budget is `Error::BudgetExceeded`.
pub fn sjpp_solve(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    budget: &SynthBudget,
) -> Result<Synthesis> {
    sjpp_search(system, c0, goal, budget).0
}
