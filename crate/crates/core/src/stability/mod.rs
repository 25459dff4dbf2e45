//! Stability of open joint plans: every goal-preventing deviation by one
//! agent must show up as a mismatch in the other agent's own state.

mod brute;
mod detection;

pub use brute::{brute_force_verify, brute_force_verify_with_budget, DEFAULT_NODE_BUDGET};
pub use detection::{mark_good, verify_detection, verify_stable, GoodSets};

use crate::model::{Agent, Config, Inefficiency, JointOpenPlan, Trajectory};

/// An actual initial configuration together with the possible initial
/// configuration whose honest run the detector's observations match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WitnessPair {
    pub actual: Config,
    pub witness: Config,
}

/// A run in which one agent deviated, the other agent saw nothing unusual,
/// and the goal was never visited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub deviator: Agent,
    pub c0: Config,
    /// The joint actions actually taken.
    pub actions: JointOpenPlan,
    pub trajectory: Trajectory,
    /// First step at which the run departs from honest behaviour.
    pub deviation_step: usize,
    pub witness: Option<WitnessPair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instability {
    NotEfficient(Inefficiency),
    Undetected(Box<Counterexample>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    Unstable(Instability),
}

impl StabilityVerdict {
    pub(crate) fn undetected(cex: Counterexample) -> Self {
        StabilityVerdict::Unstable(Instability::Undetected(Box::new(cex)))
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::Stable)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            StabilityVerdict::Unstable(Instability::Undetected(c)) => Some(c),
            _ => None,
        }
    }

    /// The deviating agent, when a counterexample exists.
    pub fn direction(&self) -> Option<Agent> {
        self.counterexample().map(|c| c.deviator)
    }
}
