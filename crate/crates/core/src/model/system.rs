use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Reserved action name for "do nothing" / crashed behaviour.
pub const NULL_ACTION: &str = "null";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    One,
    Two,
}

impl Agent {
    pub const BOTH: [Agent; 2] = [Agent::One, Agent::Two];

    pub fn other(self) -> Agent {
        match self {
            Agent::One => Agent::Two,
            Agent::Two => Agent::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Agent::One => 0,
            Agent::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Agent> {
        match n {
            1 => Some(Agent::One),
            2 => Some(Agent::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// One element of `S1 x S2 x B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub s1: StateId,
    pub s2: StateId,
    pub b: EnvId,
}

impl Config {
    pub fn new(s1: StateId, s2: StateId, b: EnvId) -> Self {
        Config { s1, s2, b }
    }

    pub fn state(&self, agent: Agent) -> StateId {
        match agent {
            Agent::One => self.s1,
            Agent::Two => self.s2,
        }
    }
}

/// A joint action `(a1, a2)`.
pub type JointAction = (ActionId, ActionId);

/// Orders a pair of per-agent values into `(agent 1, agent 2)` form.
pub fn joint(agent: Agent, own: ActionId, other: ActionId) -> JointAction {
    match agent {
        Agent::One => (own, other),
        Agent::Two => (other, own),
    }
}

pub fn action_of(joint: JointAction, agent: Agent) -> ActionId {
    match agent {
        Agent::One => joint.0,
        Agent::Two => joint.1,
    }
}

/// A structural problem with a model. Defects are data, not errors: a model
/// carrying defects can still be inspected, but the verifiers assume none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    EmptyAvailability {
        agent: Agent,
        state: String,
    },
    MissingTransition {
        key: String,
    },
    NondeterministicTransition {
        key: String,
        first: String,
        second: String,
    },
    UnavailableTransition {
        key: String,
    },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::EmptyAvailability { agent, state } => {
                write!(
                    f,
                    "agent {agent} has no available action in state `{state}`"
                )
            }
            Defect::MissingTransition { key } => write!(f, "missing transition for {key}"),
            Defect::NondeterministicTransition { key, first, second } => {
                write!(
                    f,
                    "nondeterministic transition for {key}: {first} vs {second}"
                )
            }
            Defect::UnavailableTransition { key } => {
                write!(f, "transition defined for unavailable actions {key}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Names {
    list: Vec<String>,
    index: HashMap<String, u32>,
}

impl Names {
    fn new(kind: &'static str, list: Vec<String>) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::Invalid(format!("no {kind}s declared")));
        }
        let mut index = HashMap::with_capacity(list.len());
        for (i, name) in list.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Invalid(format!("invalid {kind} name `{name}`")));
            }
            if index.insert(name.clone(), i as u32).is_some() {
                return Err(Error::Invalid(format!("duplicate {kind} `{name}`")));
            }
        }
        Ok(Names { list, index })
    }

    fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }
}

/// Identifiers are `[A-Za-z0-9_]+`.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_')
}

/// The two-agent system `<S1, S2, B, A1, A2, T>` with per-state action
/// availability.
///
/// The transition table is stored densely over every `(config, a1, a2)`
/// combination so that `step` is a single index computation. Construction
/// methods (`set_available`, `insert_transition`, `remove_transition`) may
/// leave the model with defects; `validate` reports them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemModel {
    states: [Names; 2],
    env: Names,
    actions: [Names; 2],
    avail: [Vec<Vec<ActionId>>; 2],
    table: Vec<Option<Config>>,
    conflicts: Vec<(Config, JointAction, Config)>,
}

impl SystemModel {
    pub fn new(
        states1: Vec<String>,
        states2: Vec<String>,
        env: Vec<String>,
        actions1: Vec<String>,
        actions2: Vec<String>,
    ) -> Result<Self> {
        let states = [
            Names::new("agent-1 state", states1)?,
            Names::new("agent-2 state", states2)?,
        ];
        let env = Names::new("environment state", env)?;
        let actions = [
            Names::new("agent-1 action", actions1)?,
            Names::new("agent-2 action", actions2)?,
        ];
        let avail = [
            vec![Vec::new(); states[0].list.len()],
            vec![Vec::new(); states[1].list.len()],
        ];
        let size = states[0].list.len()
            * states[1].list.len()
            * env.list.len()
            * actions[0].list.len()
            * actions[1].list.len();
        Ok(SystemModel {
            states,
            env,
            actions,
            avail,
            table: vec![None; size],
            conflicts: Vec::new(),
        })
    }

    pub fn num_states(&self, agent: Agent) -> usize {
        self.states[agent.index()].list.len()
    }

    pub fn num_env(&self) -> usize {
        self.env.list.len()
    }

    pub fn num_actions(&self, agent: Agent) -> usize {
        self.actions[agent.index()].list.len()
    }

    /// `|C| = |S1| * |S2| * |B|`.
    pub fn num_configs(&self) -> usize {
        self.num_states(Agent::One) * self.num_states(Agent::Two) * self.num_env()
    }

    pub fn config_index(&self, c: Config) -> usize {
        (c.s1.0 as usize * self.num_states(Agent::Two) + c.s2.0 as usize) * self.num_env()
            + c.b.0 as usize
    }

    pub fn config_at(&self, index: usize) -> Config {
        let nb = self.num_env();
        let n2 = self.num_states(Agent::Two);
        Config {
            b: EnvId((index % nb) as u32),
            s2: StateId(((index / nb) % n2) as u32),
            s1: StateId((index / nb / n2) as u32),
        }
    }

    pub fn configs(&self) -> impl Iterator<Item = Config> + '_ {
        (0..self.num_configs()).map(|i| self.config_at(i))
    }

    pub fn contains(&self, c: Config) -> bool {
        (c.s1.0 as usize) < self.num_states(Agent::One)
            && (c.s2.0 as usize) < self.num_states(Agent::Two)
            && (c.b.0 as usize) < self.num_env()
    }

    fn table_index(&self, c: Config, a1: ActionId, a2: ActionId) -> usize {
        (self.config_index(c) * self.num_actions(Agent::One) + a1.0 as usize)
            * self.num_actions(Agent::Two)
            + a2.0 as usize
    }

    // ---- names ----

    pub fn state_names(&self, agent: Agent) -> &[String] {
        &self.states[agent.index()].list
    }

    pub fn env_names(&self) -> &[String] {
        &self.env.list
    }

    pub fn action_names(&self, agent: Agent) -> &[String] {
        &self.actions[agent.index()].list
    }

    pub fn state_name(&self, agent: Agent, s: StateId) -> &str {
        &self.states[agent.index()].list[s.0 as usize]
    }

    pub fn env_name(&self, b: EnvId) -> &str {
        &self.env.list[b.0 as usize]
    }

    pub fn action_name(&self, agent: Agent, a: ActionId) -> &str {
        &self.actions[agent.index()].list[a.0 as usize]
    }

    pub fn state_id(&self, agent: Agent, name: &str) -> Option<StateId> {
        self.states[agent.index()].get(name).map(StateId)
    }

    pub fn env_id(&self, name: &str) -> Option<EnvId> {
        self.env.get(name).map(EnvId)
    }

    pub fn action_id(&self, agent: Agent, name: &str) -> Option<ActionId> {
        self.actions[agent.index()].get(name).map(ActionId)
    }

    pub fn null_action(&self, agent: Agent) -> Option<ActionId> {
        self.action_id(agent, NULL_ACTION)
    }

    pub fn require_state(&self, agent: Agent, name: &str) -> Result<StateId> {
        self.state_id(agent, name)
            .ok_or_else(|| Error::UnknownName {
                kind: if agent == Agent::One {
                    "agent-1 state"
                } else {
                    "agent-2 state"
                },
                name: name.to_string(),
            })
    }

    pub fn require_env(&self, name: &str) -> Result<EnvId> {
        self.env_id(name).ok_or_else(|| Error::UnknownName {
            kind: "environment state",
            name: name.to_string(),
        })
    }

    pub fn require_action(&self, agent: Agent, name: &str) -> Result<ActionId> {
        self.action_id(agent, name)
            .ok_or_else(|| Error::UnknownName {
                kind: if agent == Agent::One {
                    "agent-1 action"
                } else {
                    "agent-2 action"
                },
                name: name.to_string(),
            })
    }

    /// Resolve a configuration from its three component names.
    pub fn config_named(&self, s1: &str, s2: &str, b: &str) -> Result<Config> {
        Ok(Config {
            s1: self.require_state(Agent::One, s1)?,
            s2: self.require_state(Agent::Two, s2)?,
            b: self.require_env(b)?,
        })
    }

    /// `(s1,s2,b)` rendered with declared names.
    pub fn show(&self, c: Config) -> String {
        format!(
            "({},{},{})",
            self.state_name(Agent::One, c.s1),
            self.state_name(Agent::Two, c.s2),
            self.env_name(c.b)
        )
    }

    pub fn show_joint(&self, (a1, a2): JointAction) -> String {
        format!(
            "({},{})",
            self.action_name(Agent::One, a1),
            self.action_name(Agent::Two, a2)
        )
    }

    fn show_key(&self, c: Config, a: JointAction) -> String {
        format!("{}+{}", self.show(c), self.show_joint(a))
    }

    // ---- availability ----

    /// Replace the availability set of `state`. Actions are kept in declared
    /// order so that enumeration order is deterministic.
    pub fn set_available(&mut self, agent: Agent, state: StateId, actions: &[ActionId]) {
        let mut list = actions.to_vec();
        list.sort();
        list.dedup();
        self.avail[agent.index()][state.0 as usize] = list;
    }

    pub fn available(&self, agent: Agent, state: StateId) -> &[ActionId] {
        &self.avail[agent.index()][state.0 as usize]
    }

    pub fn is_available(&self, agent: Agent, state: StateId, action: ActionId) -> bool {
        self.available(agent, state).binary_search(&action).is_ok()
    }

    // ---- transitions ----

    /// Record `T(from, a1, a2) = to`. A second, different image for the same
    /// key is kept aside and reported by `validate` as nondeterminism.
    pub fn insert_transition(&mut self, from: Config, a1: ActionId, a2: ActionId, to: Config) {
        let i = self.table_index(from, a1, a2);
        match self.table[i] {
            Some(existing) if existing != to => self.conflicts.push((from, (a1, a2), to)),
            Some(_) => {}
            None => self.table[i] = Some(to),
        }
    }

    pub fn remove_transition(
        &mut self,
        from: Config,
        a1: ActionId,
        a2: ActionId,
    ) -> Option<Config> {
        let i = self.table_index(from, a1, a2);
        self.table[i].take()
    }

    /// Raw table lookup, ignoring availability.
    pub fn transition(&self, from: Config, a1: ActionId, a2: ActionId) -> Option<Config> {
        self.table[self.table_index(from, a1, a2)]
    }

    /// Every defined table entry, in index order.
    pub fn transitions(&self) -> impl Iterator<Item = (Config, JointAction, Config)> + '_ {
        let n1 = self.num_actions(Agent::One);
        let n2 = self.num_actions(Agent::Two);
        self.table.iter().enumerate().filter_map(move |(i, to)| {
            to.map(|to| {
                let a2 = ActionId((i % n2) as u32);
                let a1 = ActionId(((i / n2) % n1) as u32);
                (self.config_at(i / n2 / n1), (a1, a2), to)
            })
        })
    }

    /// One deterministic step of the system.
    pub fn step(&self, c: Config, a1: ActionId, a2: ActionId) -> Result<Config> {
        for (agent, a) in [(Agent::One, a1), (Agent::Two, a2)] {
            if !self.is_available(agent, c.state(agent), a) {
                return Err(Error::UnavailableAction {
                    step: None,
                    agent,
                    action: self.action_name(agent, a).to_string(),
                    state: self.state_name(agent, c.state(agent)).to_string(),
                });
            }
        }
        self.transition(c, a1, a2)
            .ok_or_else(|| Error::UndefinedTransition {
                step: None,
                config: self.show(c),
                a1: self.action_name(Agent::One, a1).to_string(),
                a2: self.action_name(Agent::Two, a2).to_string(),
            })
    }

    /// All model defects; empty iff the model is total, deterministic and
    /// carries no entries for unavailable actions.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();
        for agent in Agent::BOTH {
            for s in 0..self.num_states(agent) {
                if self.avail[agent.index()][s].is_empty() {
                    defects.push(Defect::EmptyAvailability {
                        agent,
                        state: self.state_names(agent)[s].clone(),
                    });
                }
            }
        }
        let n1 = self.num_actions(Agent::One);
        let n2 = self.num_actions(Agent::Two);
        for c in self.configs() {
            for a1 in (0..n1 as u32).map(ActionId) {
                let ok1 = self.is_available(Agent::One, c.s1, a1);
                for a2 in (0..n2 as u32).map(ActionId) {
                    let ok = ok1 && self.is_available(Agent::Two, c.s2, a2);
                    match (ok, self.transition(c, a1, a2)) {
                        (true, None) => defects.push(Defect::MissingTransition {
                            key: self.show_key(c, (a1, a2)),
                        }),
                        (false, Some(_)) => defects.push(Defect::UnavailableTransition {
                            key: self.show_key(c, (a1, a2)),
                        }),
                        _ => {}
                    }
                }
            }
        }
        for &(from, a, to) in &self.conflicts {
            let first = self
                .transition(from, a.0, a.1)
                .expect("conflict implies entry");
            defects.push(Defect::NondeterministicTransition {
                key: self.show_key(from, a),
                first: self.show(first),
                second: self.show(to),
            });
        }
        defects
    }
}

/// Name-based construction of a [`SystemModel`].
#[derive(Debug, Clone, Default)]
pub struct SystemBuilder {
    states: [Vec<String>; 2],
    env: Vec<String>,
    actions: [Vec<String>; 2],
    avail: [Vec<(String, Vec<String>)>; 2],
    rows: Vec<([String; 3], [String; 2], [String; 3])>,
}

fn owned<I, S>(items: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    items.into_iter().map(|s| s.as_ref().to_string()).collect()
}

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states<I, S>(&mut self, agent: Agent, names: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.states[agent.index()].extend(owned(names));
        self
    }

    pub fn env<I, S>(&mut self, names: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.env.extend(owned(names));
        self
    }

    pub fn actions<I, S>(&mut self, agent: Agent, names: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.actions[agent.index()].extend(owned(names));
        self
    }

    pub fn available<I, S>(&mut self, agent: Agent, state: &str, actions: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.avail[agent.index()].push((state.to_string(), owned(actions)));
        self
    }

    pub fn transition(&mut self, from: [&str; 3], actions: [&str; 2], to: [&str; 3]) -> &mut Self {
        self.rows.push((
            from.map(str::to_string),
            actions.map(str::to_string),
            to.map(str::to_string),
        ));
        self
    }

    /// Resolve all names. Structural defects are kept in the model; only
    /// undeclared names and malformed declarations fail here.
    pub fn build(&self) -> Result<SystemModel> {
        let mut sys = SystemModel::new(
            self.states[0].clone(),
            self.states[1].clone(),
            self.env.clone(),
            self.actions[0].clone(),
            self.actions[1].clone(),
        )?;
        for agent in Agent::BOTH {
            for (state, actions) in &self.avail[agent.index()] {
                let s = sys.require_state(agent, state)?;
                let mut ids = sys.available(agent, s).to_vec();
                for a in actions {
                    ids.push(sys.require_action(agent, a)?);
                }
                sys.set_available(agent, s, &ids);
            }
        }
        for (from, actions, to) in &self.rows {
            let from = sys.config_named(&from[0], &from[1], &from[2])?;
            let a1 = sys.require_action(Agent::One, &actions[0])?;
            let a2 = sys.require_action(Agent::Two, &actions[1])?;
            let to = sys.config_named(&to[0], &to[1], &to[2])?;
            sys.insert_transition(from, a1, a2, to);
        }
        Ok(sys)
    }

    /// `build` followed by `validate`; any defect is an error.
    pub fn build_valid(&self) -> Result<SystemModel> {
        let sys = self.build()?;
        let defects = sys.validate();
        if defects.is_empty() {
            Ok(sys)
        } else {
            Err(Error::Model(defects))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SystemBuilder {
        let mut b = SystemBuilder::new();
        b.states(Agent::One, ["l"])
            .states(Agent::Two, ["r"])
            .env(["e"])
            .actions(Agent::One, ["noop"])
            .actions(Agent::Two, ["noop"])
            .available(Agent::One, "l", ["noop"])
            .available(Agent::Two, "r", ["noop"]);
        b
    }

    #[test]
    fn self_loop_step() {
        let mut b = tiny();
        b.transition(["l", "r", "e"], ["noop", "noop"], ["l", "r", "e"]);
        let sys = b.build_valid().unwrap();
        let c = sys.config_named("l", "r", "e").unwrap();
        let noop1 = sys.action_id(Agent::One, "noop").unwrap();
        let noop2 = sys.action_id(Agent::Two, "noop").unwrap();
        assert_eq!(sys.step(c, noop1, noop2).unwrap(), c);
        assert_eq!(sys.num_configs(), 1);
    }

    #[test]
    fn missing_row_is_defect_and_step_error() {
        let sys = tiny().build().unwrap();
        let defects = sys.validate();
        assert_eq!(defects.len(), 1);
        assert!(matches!(defects[0], Defect::MissingTransition { .. }));
        let c = sys.config_named("l", "r", "e").unwrap();
        let err = sys.step(c, ActionId(0), ActionId(0)).unwrap_err();
        assert!(matches!(err, Error::UndefinedTransition { .. }));
    }

    #[test]
    fn conflicting_row_is_nondeterminism() {
        let mut b = tiny();
        b.states(Agent::One, ["l2"])
            .available(Agent::One, "l2", ["noop"]);
        b.transition(["l", "r", "e"], ["noop", "noop"], ["l", "r", "e"]);
        b.transition(["l", "r", "e"], ["noop", "noop"], ["l2", "r", "e"]);
        b.transition(["l2", "r", "e"], ["noop", "noop"], ["l2", "r", "e"]);
        let defects = b.build().unwrap().validate();
        assert_eq!(defects.len(), 1);
        assert!(matches!(
            defects[0],
            Defect::NondeterministicTransition { .. }
        ));
    }

    #[test]
    fn unavailable_action_rejected() {
        let mut b = tiny();
        b.actions(Agent::Two, ["other"]);
        b.transition(["l", "r", "e"], ["noop", "noop"], ["l", "r", "e"]);
        b.transition(["l", "r", "e"], ["noop", "other"], ["l", "r", "e"]);
        let sys = b.build().unwrap();
        assert!(matches!(
            sys.validate()[..],
            [Defect::UnavailableTransition { .. }]
        ));
        let c = sys.config_at(0);
        let other = sys.action_id(Agent::Two, "other").unwrap();
        assert!(matches!(
            sys.step(c, ActionId(0), other),
            Err(Error::UnavailableAction {
                agent: Agent::Two,
                ..
            })
        ));
    }

    #[test]
    fn undeclared_name_fails_build() {
        let mut b = tiny();
        b.transition(["l", "nowhere", "e"], ["noop", "noop"], ["l", "r", "e"]);
        assert!(matches!(b.build(), Err(Error::UnknownName { .. })));
    }

    #[test]
    fn config_index_round_trip() {
        let sys = SystemModel::new(
            owned(["a", "b", "c"]),
            owned(["x", "y"]),
            owned(["e", "f"]),
            owned(["go"]),
            owned(["go"]),
        )
        .unwrap();
        for i in 0..sys.num_configs() {
            assert_eq!(sys.config_index(sys.config_at(i)), i);
        }
    }
}
