//! Instance generators: the 3-SAT reduction, grid worlds and seeded random
//! systems.

mod cnf;
mod grid;
mod random;
mod reduction;

pub use cnf::{
    parse_dimacs, random_cnf, sat_brute, Assignment, Cnf, SatResult, SAT_BRUTE_MAX_VARS,
};
pub use grid::{gen_grid, Cell};
pub use random::{gen_random, gen_random_with_plan, random_walk_plan, RandomSizes};
pub use reduction::{assignment_to_plan, reduce_3sat};

use crate::format::SystemFile;
use crate::model::{Config, GoalSet, SystemModel};

/// A generated system with its initial configuration and goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub system: SystemModel,
    pub c0: Config,
    pub goal: GoalSet,
}

impl From<Instance> for SystemFile {
    fn from(inst: Instance) -> Self {
        SystemFile {
            system: inst.system,
            init: vec![inst.c0],
            goal: inst.goal,
        }
    }
}
