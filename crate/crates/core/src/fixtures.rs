//! Small hand-built systems used by the tests, the examples in the README
//! and the CLI smoke tests. The tables live as text files under
//! `fixtures/` and are parsed (and therefore validated) on load.

use crate::format::{parse_plan, parse_system, SystemFile};
use crate::model::JointOpenPlan;

pub const SYS_A: &str = include_str!("../fixtures/sys_a.sys");
pub const SYS_B: &str = include_str!("../fixtures/sys_b.sys");
pub const SYS_C: &str = include_str!("../fixtures/sys_c.sys");
pub const SYS_D: &str = include_str!("../fixtures/sys_d.sys");
pub const SYS_B_CRASH_FREEZE: &str = include_str!("../fixtures/sys_b_crash_freeze.sys");
pub const SYS_B_CRASH_DIVERT: &str = include_str!("../fixtures/sys_b_crash_divert.sys");
pub const TWO_ENV: &str = include_str!("../fixtures/two_env.sys");
pub const WITNESS: &str = include_str!("../fixtures/witness.sys");

pub const PLAN_A: &str = include_str!("../fixtures/plan_a.plan");
pub const PLAN_D: &str = include_str!("../fixtures/plan_d.plan");

fn load(text: &str) -> SystemFile {
    parse_system(text).expect("bundled fixture is valid")
}

pub fn sys_a() -> SystemFile {
    load(SYS_A)
}

pub fn sys_b() -> SystemFile {
    load(SYS_B)
}

pub fn sys_c() -> SystemFile {
    load(SYS_C)
}

pub fn sys_d() -> SystemFile {
    load(SYS_D)
}

pub fn sys_b_crash_freeze() -> SystemFile {
    load(SYS_B_CRASH_FREEZE)
}

pub fn sys_b_crash_divert() -> SystemFile {
    load(SYS_B_CRASH_DIVERT)
}

pub fn two_env() -> SystemFile {
    load(TWO_ENV)
}

pub fn witness() -> SystemFile {
    load(WITNESS)
}

/// `go` / `good`, one step.
pub fn plan_a(file: &SystemFile) -> JointOpenPlan {
    parse_plan(&file.system, PLAN_A).expect("bundled plan is valid")
}

/// `go go` / `good good`, for SYS-D.
pub fn plan_d(file: &SystemFile) -> JointOpenPlan {
    parse_plan(&file.system, PLAN_D).expect("bundled plan is valid")
}
