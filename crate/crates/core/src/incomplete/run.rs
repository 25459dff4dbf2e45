use super::dag::{ConditionalPlanDag, NodeId, PlanNode};
use crate::error::{Error, Result};
use crate::model::{
    is_goal, ActionId, Agent, Config, GoalSet, Inefficiency, JointOpenPlan, StateId, SystemModel,
    Trajectory,
};

/// The possible initial configurations, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialSet {
    configs: Vec<Config>,
}

impl InitialSet {
    pub fn new(system: &SystemModel, mut configs: Vec<Config>) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::Invalid(
                "set of initial configurations is empty".into(),
            ));
        }
        if let Some(c) = configs.iter().find(|&&c| !system.contains(c)) {
            return Err(Error::OutOfRange {
                what: "initial configuration",
                detail: format!("{c:?}"),
            });
        }
        configs.sort();
        configs.dedup();
        Ok(InitialSet { configs })
    }

    pub fn single(c: Config) -> Self {
        InitialSet { configs: vec![c] }
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

/// A run of two conditional plans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalRun {
    pub trajectory: Trajectory,
    /// The joint actions played, including implicit `null`s after halting.
    pub actions: JointOpenPlan,
    /// Step at which each agent reached a halt node.
    pub halted: [usize; 2],
}

impl ConditionalRun {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// The action a plan node prescribes in `state`: its own action, or `null`
/// once halted.
pub(crate) fn prescribed(
    system: &SystemModel,
    agent: Agent,
    dag: &ConditionalPlanDag,
    node: NodeId,
    state: StateId,
) -> Result<ActionId> {
    match dag.node(node) {
        PlanNode::Act { action, .. } => Ok(*action),
        PlanNode::Halt => system
            .null_action(agent)
            .filter(|&a| system.is_available(agent, state, a))
            .ok_or_else(|| Error::NullRequired {
                step: None,
                agent,
                state: system.state_name(agent, state).to_string(),
            }),
    }
}

pub(crate) fn advance(
    system: &SystemModel,
    agent: Agent,
    dag: &ConditionalPlanDag,
    node: NodeId,
    observed: StateId,
) -> Result<NodeId> {
    dag.next(node, observed)
        .ok_or_else(|| Error::MissingBranch {
            node: node.0,
            state: system.state_name(agent, observed).to_string(),
        })
}

/// Runs both plans synchronously from `c0`. Each agent picks its action from
/// its current node and then branches on its own new state. An agent that
/// has halted plays `null` until the other halts too.
pub fn execute_conditional(
    system: &SystemModel,
    c0: Config,
    plan1: &ConditionalPlanDag,
    plan2: &ConditionalPlanDag,
) -> Result<ConditionalRun> {
    let plans = [plan1, plan2];
    let mut nodes = [plan1.root(), plan2.root()];
    let halted_at =
        |nodes: &[NodeId; 2], i: usize| matches!(plans[i].node(nodes[i]), PlanNode::Halt);
    let mut halted = [usize::MAX; 2];
    let mut configs = vec![c0];
    let mut actions = JointOpenPlan::default();
    let mut c = c0;
    let mut step = 0;
    loop {
        for agent in Agent::BOTH {
            let i = agent.index();
            if halted[i] == usize::MAX && halted_at(&nodes, i) {
                halted[i] = step;
            }
        }
        if halted.iter().all(|&h| h != usize::MAX) {
            break;
        }
        let mut acts = [ActionId(0); 2];
        for agent in Agent::BOTH {
            let i = agent.index();
            acts[i] = prescribed(system, agent, plans[i], nodes[i], c.state(agent))
                .map_err(|e| e.at_step(step))?;
        }
        c = system
            .step(c, acts[0], acts[1])
            .map_err(|e| e.at_step(step))?;
        for agent in Agent::BOTH {
            let i = agent.index();
            nodes[i] = advance(system, agent, plans[i], nodes[i], c.state(agent))?;
        }
        configs.push(c);
        actions.push((acts[0], acts[1]));
        step += 1;
    }
    Ok(ConditionalRun {
        trajectory: Trajectory::new(configs, None),
        actions,
        halted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IiEfficiency {
    Efficient,
    Inefficient { c0: Config, reason: Inefficiency },
}

impl IiEfficiency {
    pub fn is_efficient(&self) -> bool {
        matches!(self, IiEfficiency::Efficient)
    }
}

/// Every run from a possible initial configuration visits the goal and has
/// at most `|C|` joint steps. Reports the first failing configuration in
/// sorted order.
pub fn verify_ii_efficiency(
    system: &SystemModel,
    c0s: &InitialSet,
    goal: &GoalSet,
    plan1: &ConditionalPlanDag,
    plan2: &ConditionalPlanDag,
) -> Result<IiEfficiency> {
    let bound = system.num_configs();
    for &c0 in c0s.configs() {
        let run = execute_conditional(system, c0, plan1, plan2)?;
        let reason = if run.len() > bound {
            Some(Inefficiency::TooLong {
                len: run.len(),
                bound,
            })
        } else if !run.trajectory.configs.iter().any(|&c| is_goal(goal, c)) {
            Some(Inefficiency::GoalMissed)
        } else {
            None
        };
        if let Some(reason) = reason {
            return Ok(IiEfficiency::Inefficient { c0, reason });
        }
    }
    Ok(IiEfficiency::Efficient)
}
