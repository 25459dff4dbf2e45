use std::collections::HashSet;

use super::dag::{ConditionalPlanDag, NodeId};
use super::run::{
    advance, execute_conditional, prescribed, ConditionalRun, IiEfficiency, InitialSet,
};
use super::verify_ii_efficiency;
use crate::error::{Error, Result};
use crate::model::{
    is_goal, joint, ActionId, Agent, Config, GoalSet, JointOpenPlan, SystemModel, Trajectory,
};
use crate::stability::{Counterexample, StabilityVerdict, WitnessPair};

/// Search state: a configuration and, while the deviator has played exactly
/// what its plan prescribes, its current plan node.
type Key = (Config, Option<NodeId>);

/// Stability against one deviator when the initial configuration is only
/// known to lie in `c0s`.
///
/// The detector notices a deviation once its observations match no honest
/// run from any possible initial configuration. Consistency with a given
/// honest run can only be lost, never regained, so a deviation goes
/// unnoticed exactly when one honest run (the witness) matches the detector's
/// observations at every step. For each actual start and each witness
/// sharing the detector's initial state, a forward search therefore keeps
/// the configurations reachable while the detector sees the witness's
/// observations and plays the witness's actions, dropping goal
/// configurations. The plan is unstable when some run survives to the
/// witness's last step having actually deviated.
///
/// The deviator's plan node is tracked until it first departs from its plan;
/// runs that never depart are honest and do not count.
pub fn verify_ii_stability(
    system: &SystemModel,
    c0s: &InitialSet,
    goal: &GoalSet,
    plan1: &ConditionalPlanDag,
    plan2: &ConditionalPlanDag,
    deviator: Agent,
) -> Result<StabilityVerdict> {
    if let IiEfficiency::Inefficient { reason, .. } =
        verify_ii_efficiency(system, c0s, goal, plan1, plan2)?
    {
        return Err(Error::NotEfficient(reason));
    }
    let detector = deviator.other();
    let dev_plan = [plan1, plan2][deviator.index()];
    let honest: Vec<ConditionalRun> = c0s
        .configs()
        .iter()
        .map(|&c| execute_conditional(system, c, plan1, plan2))
        .collect::<Result<_>>()?;

    for &actual in c0s.configs() {
        for (w, &witness) in c0s.configs().iter().enumerate() {
            if witness.state(detector) != actual.state(detector) {
                continue;
            }
            let run = &honest[w];
            if let Some(cex) = search_pair(system, goal, dev_plan, deviator, actual, witness, run)?
            {
                return Ok(StabilityVerdict::undetected(cex));
            }
        }
    }
    Ok(StabilityVerdict::Stable)
}

fn search_pair(
    system: &SystemModel,
    goal: &GoalSet,
    dev_plan: &ConditionalPlanDag,
    deviator: Agent,
    actual: Config,
    witness: Config,
    run: &ConditionalRun,
) -> Result<Option<Counterexample>> {
    let detector = deviator.other();
    let observed: Vec<_> = run.trajectory.states(detector).collect();
    let det_actions = run.actions.actions(detector);
    let horizon = run.len();
    if is_goal(goal, actual) || horizon == 0 {
        return Ok(None);
    }

    // layers[u]: states with a back-pointer (index in layers[u-1], deviator action)
    let mut layers: Vec<Vec<(Key, usize, ActionId)>> =
        vec![vec![((actual, Some(dev_plan.root())), 0, ActionId(0))]];
    for u in 0..horizon {
        let mut next: Vec<(Key, usize, ActionId)> = Vec::new();
        let mut seen: HashSet<Key> = HashSet::new();
        for (i, &((c, tag), _, _)) in layers[u].iter().enumerate() {
            let own = c.state(deviator);
            let expected = match tag {
                Some(n) => Some(prescribed(system, deviator, dev_plan, n, own)?),
                None => None,
            };
            for &e in system.available(deviator, own) {
                let (a1, a2) = joint(deviator, e, det_actions[u]);
                let c2 = system.step(c, a1, a2).map_err(|err| err.at_step(u))?;
                if c2.state(detector) != observed[u + 1] || is_goal(goal, c2) {
                    continue;
                }
                let tag2 = match (tag, expected) {
                    (Some(n), Some(x)) if x == e => {
                        Some(advance(system, deviator, dev_plan, n, c2.state(deviator))?)
                    }
                    _ => None,
                };
                if seen.insert((c2, tag2)) {
                    next.push(((c2, tag2), i, e));
                }
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        layers.push(next);
    }

    let Some(end) = layers[horizon]
        .iter()
        .position(|((_, tag), _, _)| tag.is_none())
    else {
        return Ok(None);
    };
    let mut configs = vec![actual; horizon + 1];
    let mut actions = vec![(ActionId(0), ActionId(0)); horizon];
    let mut tags = vec![None; horizon + 1];
    let mut idx = end;
    for u in (1..=horizon).rev() {
        let ((c, tag), prev, e) = layers[u][idx];
        configs[u] = c;
        tags[u] = tag;
        actions[u - 1] = joint(deviator, e, det_actions[u - 1]);
        idx = prev;
    }
    tags[0] = Some(dev_plan.root());
    let deviation_step = (0..horizon)
        .find(|&u| tags[u + 1].is_none())
        .expect("run ends deviated");
    Ok(Some(Counterexample {
        deviator,
        c0: actual,
        actions: JointOpenPlan::from_joint(&actions),
        trajectory: Trajectory::new(configs, Some(goal)),
        deviation_step,
        witness: Some(WitnessPair { actual, witness }),
    }))
}
