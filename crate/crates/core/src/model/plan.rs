use std::fmt;

use super::system::{ActionId, Agent, Config, EnvId, JointAction, StateId, SystemModel};
use crate::error::{Error, Result};

/// A pair of equal-length action sequences, one joint action per step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct JointOpenPlan {
    seq1: Vec<ActionId>,
    seq2: Vec<ActionId>,
}

impl JointOpenPlan {
    pub fn new(seq1: Vec<ActionId>, seq2: Vec<ActionId>) -> Result<Self> {
        if seq1.len() != seq2.len() {
            return Err(Error::LengthMismatch {
                len1: seq1.len(),
                len2: seq2.len(),
            });
        }
        Ok(JointOpenPlan { seq1, seq2 })
    }

    pub fn from_joint(steps: &[JointAction]) -> Self {
        JointOpenPlan {
            seq1: steps.iter().map(|j| j.0).collect(),
            seq2: steps.iter().map(|j| j.1).collect(),
        }
    }

    /// Resolve a plan from action names.
    pub fn named(system: &SystemModel, seq1: &[&str], seq2: &[&str]) -> Result<Self> {
        let one = seq1
            .iter()
            .map(|a| system.require_action(Agent::One, a))
            .collect::<Result<Vec<_>>>()?;
        let two = seq2
            .iter()
            .map(|a| system.require_action(Agent::Two, a))
            .collect::<Result<Vec<_>>>()?;
        JointOpenPlan::new(one, two)
    }

    /// Number of joint steps `t`.
    pub fn len(&self) -> usize {
        self.seq1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq1.is_empty()
    }

    pub fn joint(&self, step: usize) -> JointAction {
        (self.seq1[step], self.seq2[step])
    }

    pub fn steps(&self) -> impl Iterator<Item = JointAction> + '_ {
        self.seq1.iter().copied().zip(self.seq2.iter().copied())
    }

    pub fn actions(&self, agent: Agent) -> &[ActionId] {
        match agent {
            Agent::One => &self.seq1,
            Agent::Two => &self.seq2,
        }
    }

    pub fn push(&mut self, (a1, a2): JointAction) {
        self.seq1.push(a1);
        self.seq2.push(a2);
    }

    pub fn pop(&mut self) -> Option<JointAction> {
        Some((self.seq1.pop()?, self.seq2.pop()?))
    }

    /// `agent1: ...` / `agent2: ...` rendering.
    pub fn show(&self, system: &SystemModel) -> String {
        let names = |agent: Agent| {
            self.actions(agent)
                .iter()
                .map(|&a| system.action_name(agent, a))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "agent1: {}\nagent2: {}\n",
            names(Agent::One),
            names(Agent::Two)
        )
    }
}

/// One goal pattern; `None` components are wildcards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GoalPattern {
    pub s1: Option<StateId>,
    pub s2: Option<StateId>,
    pub b: Option<EnvId>,
}

impl GoalPattern {
    pub fn exact(c: Config) -> Self {
        GoalPattern {
            s1: Some(c.s1),
            s2: Some(c.s2),
            b: Some(c.b),
        }
    }

    pub fn matches(&self, c: Config) -> bool {
        self.s1.is_none_or(|s| s == c.s1)
            && self.s2.is_none_or(|s| s == c.s2)
            && self.b.is_none_or(|b| b == c.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoalSet {
    pub patterns: Vec<GoalPattern>,
}

impl GoalSet {
    pub fn new(patterns: Vec<GoalPattern>) -> Self {
        GoalSet { patterns }
    }

    pub fn single(c: Config) -> Self {
        GoalSet::new(vec![GoalPattern::exact(c)])
    }

    /// Resolve a pattern from names, `*` being the wildcard.
    pub fn pattern_named(system: &SystemModel, s1: &str, s2: &str, b: &str) -> Result<GoalPattern> {
        let wild = |s: &str| s == "*";
        Ok(GoalPattern {
            s1: if wild(s1) {
                None
            } else {
                Some(system.require_state(Agent::One, s1)?)
            },
            s2: if wild(s2) {
                None
            } else {
                Some(system.require_state(Agent::Two, s2)?)
            },
            b: if wild(b) {
                None
            } else {
                Some(system.require_env(b)?)
            },
        })
    }

    pub fn push(&mut self, p: GoalPattern) {
        self.patterns.push(p);
    }

    pub fn contains(&self, c: Config) -> bool {
        is_goal(self, c)
    }
}

pub fn is_goal(goal: &GoalSet, c: Config) -> bool {
    goal.patterns.iter().any(|p| p.matches(c))
}

/// The configurations visited by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub configs: Vec<Config>,
    pub goal_visited: Option<usize>,
}

impl Trajectory {
    pub fn new(configs: Vec<Config>, goal: Option<&GoalSet>) -> Self {
        let goal_visited = goal.and_then(|g| configs.iter().position(|&c| is_goal(g, c)));
        Trajectory {
            configs,
            goal_visited,
        }
    }

    pub fn states(&self, agent: Agent) -> impl Iterator<Item = StateId> + '_ {
        self.configs.iter().map(move |c| c.state(agent))
    }

    pub fn last(&self) -> Config {
        *self
            .configs
            .last()
            .expect("trajectory has at least one configuration")
    }
}

/// Forward simulation of an open plan.
pub fn execute_open(
    system: &SystemModel,
    c0: Config,
    plan: &JointOpenPlan,
    goal: Option<&GoalSet>,
) -> Result<Trajectory> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let mut configs = Vec::with_capacity(plan.len() + 1);
    configs.push(c0);
    let mut c = c0;
    for (u, (a1, a2)) in plan.steps().enumerate() {
        c = system.step(c, a1, a2).map_err(|e| e.at_step(u))?;
        configs.push(c);
    }
    Ok(Trajectory::new(configs, goal))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inefficiency {
    GoalMissed,
    TooLong { len: usize, bound: usize },
}

impl fmt::Display for Inefficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inefficiency::GoalMissed => write!(f, "goal-missed"),
            Inefficiency::TooLong { len, bound } => {
                write!(f, "too-long ({len} steps > bound {bound})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Efficiency {
    Efficient { goal_step: usize },
    Inefficient(Inefficiency),
}

impl Efficiency {
    pub fn is_efficient(&self) -> bool {
        matches!(self, Efficiency::Efficient { .. })
    }
}

/// A plan is efficient when its run visits the goal and it has at most
/// `|C|` joint steps. The length bound is checked before simulating.
pub fn check_efficient(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
) -> Result<Efficiency> {
    let bound = system.num_configs();
    if plan.len() > bound {
        return Ok(Efficiency::Inefficient(Inefficiency::TooLong {
            len: plan.len(),
            bound,
        }));
    }
    let run = execute_open(system, c0, plan, Some(goal))?;
    Ok(match run.goal_visited {
        Some(goal_step) => Efficiency::Efficient { goal_step },
        None => Efficiency::Inefficient(Inefficiency::GoalMissed),
    })
}
