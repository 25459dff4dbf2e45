use std::collections::HashMap;

use super::{Counterexample, Instability, StabilityVerdict};
use crate::error::{Error, Result};
use crate::model::{
    check_efficient, execute_open, is_goal, joint, ActionId, Agent, Config, Efficiency, GoalSet,
    JointOpenPlan, StateId, SystemModel, Trajectory,
};

/// `Good[k]` for `k = 0..=t`, each layer sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSets {
    pub layers: Vec<Vec<Config>>,
}

impl GoodSets {
    pub fn contains(&self, k: usize, c: Config) -> bool {
        self.layers[k].binary_search(&c).is_ok()
    }
}

/// Configurations reachable at each time stamp while the detector follows
/// its plan, restricted to those in which the detector's state equals its
/// nominal state. Everything outside these layers is either unreachable or
/// already detected.
struct Layers {
    configs: Vec<Vec<Config>>,
    /// `succ[k][i]`: deviator action and index in layer `k + 1`.
    succ: Vec<Vec<Vec<(ActionId, usize)>>>,
}

fn build_layers(
    system: &SystemModel,
    c0: Config,
    plan: &JointOpenPlan,
    deviator: Agent,
    nominal: &[StateId],
) -> Result<Layers> {
    let detector = deviator.other();
    let t = plan.len();
    let mut configs = vec![vec![c0]];
    let mut succ = Vec::with_capacity(t);
    for k in 0..t {
        let own = plan.actions(detector)[k];
        let mut next: Vec<Config> = Vec::new();
        let mut index: HashMap<Config, usize> = HashMap::new();
        let mut edges = Vec::with_capacity(configs[k].len());
        for &c in &configs[k] {
            let mut out = Vec::new();
            for &e in system.available(deviator, c.state(deviator)) {
                let (a1, a2) = joint(deviator, e, own);
                let n = system.step(c, a1, a2).map_err(|err| err.at_step(k))?;
                if n.state(detector) != nominal[k + 1] {
                    continue;
                }
                let i = *index.entry(n).or_insert_with(|| {
                    next.push(n);
                    next.len() - 1
                });
                out.push((e, i));
            }
            edges.push(out);
        }
        configs.push(next);
        succ.push(edges);
    }
    Ok(Layers { configs, succ })
}

fn require_efficient(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
) -> Result<Trajectory> {
    match check_efficient(system, c0, goal, plan)? {
        Efficiency::Efficient { .. } => execute_open(system, c0, plan, Some(goal)),
        Efficiency::Inefficient(why) => Err(Error::NotEfficient(why)),
    }
}

/// Backward marking: a layer member is good when some deviator action keeps
/// it inside the next good layer; every member of the last layer is good.
fn good_flags(layers: &Layers) -> Vec<Vec<bool>> {
    let t = layers.succ.len();
    let mut good: Vec<Vec<bool>> = layers
        .configs
        .iter()
        .map(|l| vec![false; l.len()])
        .collect();
    good[t].iter_mut().for_each(|g| *g = true);
    for k in (0..t).rev() {
        for i in 0..layers.configs[k].len() {
            good[k][i] = layers.succ[k][i].iter().any(|&(_, j)| good[k + 1][j]);
        }
    }
    good
}

/// Marks the configurations from which the deviator can keep the detector's
/// state on its nominal track up to the end of the plan.
///
/// Only configurations reachable from `c0` (detector on plan, deviator
/// arbitrary) are listed; unreachable ones cannot influence the verdict.
pub fn mark_good(
    system: &SystemModel,
    goal: &GoalSet,
    plan: &JointOpenPlan,
    c0: Config,
    deviator: Agent,
) -> Result<GoodSets> {
    let honest = require_efficient(system, c0, goal, plan)?;
    let nominal: Vec<StateId> = honest.states(deviator.other()).collect();
    let layers = build_layers(system, c0, plan, deviator, &nominal)?;
    let good = good_flags(&layers);
    let mut out = Vec::with_capacity(layers.configs.len());
    for (configs, flags) in layers.configs.iter().zip(&good) {
        let mut layer: Vec<Config> = configs
            .iter()
            .zip(flags)
            .filter_map(|(&c, &g)| g.then_some(c))
            .collect();
        layer.sort();
        out.push(layer);
    }
    Ok(GoodSets { layers: out })
}

/// Decides whether every goal-avoiding deviation by `deviator` is detected
/// by the other agent within the plan horizon.
///
/// The marking runs to completion first; because marks at time `k` depend
/// only on time `k + 1`, a single backward sweep reaches the fixpoint that
/// repeated marking rounds would. A second sweep then looks for a run through
/// good configurations that never touches the goal.
///
/// No constraint forces the deviator's actions to differ from the plan: a
/// run built only from prescribed actions is the honest run, which visits the
/// goal because the plan is efficient, so it can never be returned.
pub fn verify_detection(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
    deviator: Agent,
) -> Result<StabilityVerdict> {
    let honest = require_efficient(system, c0, goal, plan)?;
    let detector = deviator.other();
    let nominal: Vec<StateId> = honest.states(detector).collect();
    let layers = build_layers(system, c0, plan, deviator, &nominal)?;
    let good = good_flags(&layers);
    let t = plan.len();

    let mut bad: Vec<Vec<bool>> = good.clone();
    for k in (0..=t).rev() {
        for (i, &c) in layers.configs[k].iter().enumerate() {
            bad[k][i] = good[k][i]
                && !is_goal(goal, c)
                && (k == t || layers.succ[k][i].iter().any(|&(_, j)| bad[k + 1][j]));
        }
    }
    if !bad[0][0] {
        return Ok(StabilityVerdict::Stable);
    }

    let mut actions = JointOpenPlan::default();
    let mut i = 0;
    for k in 0..t {
        let &(e, j) = layers.succ[k][i]
            .iter()
            .find(|&&(_, j)| bad[k + 1][j])
            .expect("bad configuration has a bad successor");
        actions.push(joint(deviator, e, plan.actions(detector)[k]));
        i = j;
    }
    let trajectory = execute_open(system, c0, &actions, Some(goal))?;
    let deviation_step = (0..t)
        .find(|&k| actions.actions(deviator)[k] != plan.actions(deviator)[k])
        .unwrap_or(t);
    Ok(StabilityVerdict::undetected(Counterexample {
        deviator,
        c0,
        actions,
        trajectory,
        deviation_step,
        witness: None,
    }))
}

/// Efficient, and stable against deviations of either agent. Agent 1's
/// deviations are checked first.
pub fn verify_stable(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
) -> Result<StabilityVerdict> {
    if let Efficiency::Inefficient(why) = check_efficient(system, c0, goal, plan)? {
        return Ok(StabilityVerdict::Unstable(Instability::NotEfficient(why)));
    }
    for deviator in Agent::BOTH {
        let v = verify_detection(system, c0, goal, plan, deviator)?;
        if !v.is_stable() {
            return Ok(v);
        }
    }
    Ok(StabilityVerdict::Stable)
}
