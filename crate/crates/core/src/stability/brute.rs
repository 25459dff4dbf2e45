//! Exhaustive cross-check for the detection verifier. It walks every
//! available deviator action sequence depth-first and shares nothing with the
//! marking code except the model's `step`.

use super::{Counterexample, StabilityVerdict};
use crate::error::{Error, Result};
use crate::model::{
    check_efficient, execute_open, is_goal, joint, ActionId, Agent, Config, Efficiency, GoalSet,
    JointOpenPlan, StateId, SystemModel,
};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

pub fn brute_force_verify(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
    deviator: Agent,
) -> Result<StabilityVerdict> {
    brute_force_verify_with_budget(system, c0, goal, plan, deviator, DEFAULT_NODE_BUDGET)
}

struct Search<'a> {
    system: &'a SystemModel,
    goal: &'a GoalSet,
    detector_plan: &'a [ActionId],
    nominal: Vec<StateId>,
    deviator: Agent,
    nodes: u64,
    budget: u64,
    path: Vec<ActionId>,
}

impl Search<'_> {
    /// `true` when an undetected goal-avoiding continuation exists from `c`
    /// at depth `u`; `path` then holds the deviator's actions.
    fn dfs(&mut self, u: usize, c: Config) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { nodes: self.nodes });
        }
        let detector = self.deviator.other();
        if is_goal(self.goal, c) || c.state(detector) != self.nominal[u] {
            return Ok(false);
        }
        if u == self.detector_plan.len() {
            return Ok(true);
        }
        let own = self.detector_plan[u];
        for &e in self.system.available(self.deviator, c.state(self.deviator)) {
            let (a1, a2) = joint(self.deviator, e, own);
            let next = self.system.step(c, a1, a2).map_err(|err| err.at_step(u))?;
            self.path.push(e);
            if self.dfs(u + 1, next)? {
                return Ok(true);
            }
            self.path.pop();
        }
        Ok(false)
    }
}

pub fn brute_force_verify_with_budget(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
    deviator: Agent,
    budget: u64,
) -> Result<StabilityVerdict> {
    if let Efficiency::Inefficient(why) = check_efficient(system, c0, goal, plan)? {
        return Err(Error::NotEfficient(why));
    }
    let detector = deviator.other();
    let honest = execute_open(system, c0, plan, None)?;
    let mut search = Search {
        system,
        goal,
        detector_plan: plan.actions(detector),
        nominal: honest.states(detector).collect(),
        deviator,
        nodes: 0,
        budget,
        path: Vec::with_capacity(plan.len()),
    };
    if !search.dfs(0, c0)? {
        return Ok(StabilityVerdict::Stable);
    }
    let steps: Vec<_> = search
        .path
        .iter()
        .zip(plan.actions(detector))
        .map(|(&e, &own)| joint(deviator, e, own))
        .collect();
    let actions = JointOpenPlan::from_joint(&steps);
    let trajectory = execute_open(system, c0, &actions, Some(goal))?;
    let deviation_step = search
        .path
        .iter()
        .zip(plan.actions(deviator))
        .position(|(a, b)| a != b)
        .unwrap_or(plan.len());
    Ok(StabilityVerdict::undetected(Counterexample {
        deviator,
        c0,
        actions,
        trajectory,
        deviation_step,
        witness: None,
    }))
}
