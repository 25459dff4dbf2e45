//! System model, configurations, open plans and their deterministic
//! execution.

mod plan;
mod system;

pub use plan::{
    check_efficient, execute_open, is_goal, Efficiency, GoalPattern, GoalSet, Inefficiency,
    JointOpenPlan, Trajectory,
};
pub use system::{
    action_of, is_identifier, joint, ActionId, Agent, Config, Defect, EnvId, JointAction, StateId,
    SystemBuilder, SystemModel, NULL_ACTION,
};

/// Free-function form of [`SystemModel::step`].
pub fn step(system: &SystemModel, c: Config, a1: ActionId, a2: ActionId) -> crate::Result<Config> {
    system.step(c, a1, a2)
}

/// Free-function form of [`SystemModel::validate`].
pub fn validate_system(system: &SystemModel) -> Vec<Defect> {
    system.validate()
}
