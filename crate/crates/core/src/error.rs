use thiserror::Error;

use crate::model::{Agent, Defect, Inefficiency};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{}action `{action}` is not available to agent {agent} in state `{state}`", step_prefix(*.step))]
    UnavailableAction {
        step: Option<usize>,
        agent: Agent,
        action: String,
        state: String,
    },

    #[error("{}no transition defined for {config} under ({a1}, {a2})", step_prefix(*.step))]
    UndefinedTransition {
        step: Option<usize>,
        config: String,
        a1: String,
        a2: String,
    },

    #[error("plan is empty")]
    EmptyPlan,

    #[error("plan length mismatch: agent 1 has {len1} actions, agent 2 has {len2}")]
    LengthMismatch { len1: usize, len2: usize },

    #[error("plan is not efficient: {0}")]
    NotEfficient(Inefficiency),

    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("window graph too large: {size} exceeds budget {budget}")]
    WindowExplosion { size: u128, budget: u128 },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("model has {} defect(s): {}", .0.len(), format_defects(.0))]
    Model(Vec<Defect>),

    #[error("plan node {node} has no branch for observed state `{state}`")]
    MissingBranch { node: usize, state: String },

    #[error("{}agent {agent} must play `null` in state `{state}` but no null transition is available", step_prefix(*.step))]
    NullRequired {
        step: Option<usize>,
        agent: Agent,
        state: String,
    },

    #[error("assignment does not cover variable x{var}")]
    PartialAssignment { var: usize },

    #[error("too many variables for exhaustive enumeration: {n} > {max}")]
    TooManyVars { n: usize, max: usize },

    #[error("invalid CNF: {0}")]
    InvalidCnf(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("observation `{0}` is not a state of the detector")]
    ObservationOutOfRange(String),

    #[error("malformed plan encoding at line {line}: {message}")]
    MalformedEncoding { line: usize, message: String },

    #[error("line {line}: reference to undeclared node `{node}`")]
    DanglingNodeRef { line: usize, node: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

fn step_prefix(step: Option<usize>) -> String {
    match step {
        Some(s) => format!("step {s}: "),
        None => String::new(),
    }
}

fn format_defects(defects: &[Defect]) -> String {
    defects
        .iter()
        .take(5)
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Attach a step index to execution errors that were raised without one.
    pub(crate) fn at_step(self, at: usize) -> Self {
        match self {
            Error::UnavailableAction {
                step: None,
                agent,
                action,
                state,
            } => Error::UnavailableAction {
                step: Some(at),
                agent,
                action,
                state,
            },
            Error::UndefinedTransition {
                step: None,
                config,
                a1,
                a2,
            } => Error::UndefinedTransition {
                step: Some(at),
                config,
                a1,
                a2,
            },
            Error::NullRequired {
                step: None,
                agent,
                state,
            } => Error::NullRequired {
                step: Some(at),
                agent,
                state,
            },
            other => other,
        }
    }
}
