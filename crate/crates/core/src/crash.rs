//! Stability against crash failures only: from some step on, one agent stops
//! following its plan and plays `null` forever. There are only
//! `2 * horizon` such deviations per initial configuration, so every one is
//! simulated directly.

use crate::error::{Error, Result};
use crate::incomplete::{
    execute_conditional, verify_ii_efficiency, ConditionalPlanDag, ConditionalRun, IiEfficiency,
    InitialSet, PlanNode,
};
use crate::model::{
    is_goal, ActionId, Agent, Config, GoalSet, JointOpenPlan, SystemModel, Trajectory,
};
use crate::stability::{Counterexample, StabilityVerdict, WitnessPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrashScenario {
    pub crasher: Agent,
    /// First step at which the crasher plays `null`.
    pub time: usize,
}

/// Every scenario with a crash strictly before `horizon`, agent 1 first.
pub fn crash_scenarios(horizon: usize) -> Vec<CrashScenario> {
    Agent::BOTH
        .into_iter()
        .flat_map(|crasher| (0..horizon).map(move |time| CrashScenario { crasher, time }))
        .collect()
}

fn null_for(system: &SystemModel, agent: Agent, c: Config, step: usize) -> Result<ActionId> {
    system
        .null_action(agent)
        .filter(|&a| system.is_available(agent, c.state(agent), a))
        .ok_or_else(|| Error::NullRequired {
            step: Some(step),
            agent,
            state: system.state_name(agent, c.state(agent)).to_string(),
        })
}

/// Simulates a crash. Before `scenario.time` both agents follow their plans;
/// from then on the crasher plays `null`. The run ends once the healthy
/// agent has halted and the crasher has halted or crashed; a halted agent
/// plays `null` as in an honest run. The run also ends early when the
/// healthy agent's next action is unavailable in its current state.
pub fn crash_run(
    system: &SystemModel,
    c0: Config,
    plan1: &ConditionalPlanDag,
    plan2: &ConditionalPlanDag,
    scenario: CrashScenario,
) -> Result<ConditionalRun> {
    let plans = [plan1, plan2];
    let crasher = scenario.crasher.index();
    let mut nodes = [plan1.root(), plan2.root()];
    let mut halted = [usize::MAX; 2];
    let mut configs = vec![c0];
    let mut actions = JointOpenPlan::default();
    let mut c = c0;
    let mut step = 0;
    loop {
        for i in 0..2 {
            if halted[i] == usize::MAX && matches!(plans[i].node(nodes[i]), PlanNode::Halt) {
                halted[i] = step;
            }
        }
        let crashed = step >= scenario.time;
        let healthy_done = halted[1 - crasher] != usize::MAX;
        let crasher_done = crashed || halted[crasher] != usize::MAX;
        if healthy_done && crasher_done {
            break;
        }
        let mut acts = [ActionId(0); 2];
        for agent in Agent::BOTH {
            let i = agent.index();
            acts[i] = if i == crasher && crashed {
                null_for(system, agent, c, step)?
            } else {
                match plans[i].node(nodes[i]) {
                    PlanNode::Act { action, .. } => *action,
                    PlanNode::Halt => null_for(system, agent, c, step)?,
                }
            };
        }
        let healthy = scenario.crasher.other();
        let h = healthy.index();
        if halted[h] == usize::MAX && !system.is_available(healthy, c.state(healthy), acts[h]) {
            // No honest run reaches this node in this state, so the healthy
            // agent has already noticed the crash.
            break;
        }
        let next = system.step(c, acts[0], acts[1]).map_err(|e| match e {
            Error::UndefinedTransition { .. } if crashed => Error::NullRequired {
                step: Some(step),
                agent: scenario.crasher,
                state: system
                    .state_name(scenario.crasher, c.state(scenario.crasher))
                    .to_string(),
            },
            e => e.at_step(step),
        })?;
        c = next;
        for agent in Agent::BOTH {
            let i = agent.index();
            if !(i == crasher && crashed) {
                nodes[i] = plans[i].next(nodes[i], c.state(agent)).ok_or_else(|| {
                    Error::MissingBranch {
                        node: nodes[i].0,
                        state: system.state_name(agent, c.state(agent)).to_string(),
                    }
                })?;
            }
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

/// Stable when every crash that keeps the run out of the goal is noticed by
/// the other agent: its observations must stop matching the honest run from
/// every possible initial configuration that shares its initial state.
/// Crashes at every step before the end of the honest run are tried, by each
/// agent, from each possible initial configuration.
pub fn verify_crash_stability(
    system: &SystemModel,
    c0s: &InitialSet,
    goal: &GoalSet,
    plan1: &ConditionalPlanDag,
    plan2: &ConditionalPlanDag,
) -> Result<StabilityVerdict> {
    if let IiEfficiency::Inefficient { reason, .. } =
        verify_ii_efficiency(system, c0s, goal, plan1, plan2)?
    {
        return Err(Error::NotEfficient(reason));
    }
    let honest: Vec<ConditionalRun> = c0s
        .configs()
        .iter()
        .map(|&c| execute_conditional(system, c, plan1, plan2))
        .collect::<Result<_>>()?;

    for (a, &actual) in c0s.configs().iter().enumerate() {
        for scenario in crash_scenarios(honest[a].len()) {
            let run = crash_run(system, actual, plan1, plan2, scenario)?;
            if run.trajectory.configs.iter().any(|&c| is_goal(goal, c)) {
                continue;
            }
            let detector = scenario.crasher.other();
            let seen: Vec<_> = run.trajectory.states(detector).collect();
            for (w, &witness) in c0s.configs().iter().enumerate() {
                let expected: Vec<_> = honest[w].trajectory.states(detector).collect();
                let matches = seen.len() <= expected.len() && expected[..seen.len()] == seen[..];
                if matches {
                    return Ok(StabilityVerdict::undetected(Counterexample {
                        deviator: scenario.crasher,
                        c0: actual,
                        actions: run.actions,
                        trajectory: Trajectory::new(run.trajectory.configs, Some(goal)),
                        deviation_step: scenario.time,
                        witness: Some(WitnessPair { actual, witness }),
                    }));
                }
            }
        }
    }
    Ok(StabilityVerdict::Stable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::incomplete::lift;
    use crate::model::{execute_open, SystemBuilder};

    fn lifted(f: &crate::format::SystemFile) -> (ConditionalPlanDag, ConditionalPlanDag) {
        let plan = fixtures::plan_a(f);
        (lift(&plan, Agent::One), lift(&plan, Agent::Two))
    }

    #[test]
    fn late_crash_is_honest() {
        let f = fixtures::sys_b_crash_freeze();
        let (p1, p2) = lifted(&f);
        let honest = execute_conditional(&f.system, f.init[0], &p1, &p2).unwrap();
        for crasher in Agent::BOTH {
            for time in [1, 5] {
                let run = crash_run(
                    &f.system,
                    f.init[0],
                    &p1,
                    &p2,
                    CrashScenario { crasher, time },
                )
                .unwrap();
                assert_eq!(run.trajectory, honest.trajectory);
            }
        }
    }

    #[test]
    fn freeze_keeps_agent_two_at_v0() {
        let f = fixtures::sys_b_crash_freeze();
        let (p1, p2) = lifted(&f);
        let scenario = CrashScenario {
            crasher: Agent::Two,
            time: 0,
        };
        let run = crash_run(&f.system, f.init[0], &p1, &p2, scenario).unwrap();
        assert_eq!(f.system.show(run.trajectory.last()), "(u1,v0,e)");
        let c0s = InitialSet::single(f.init[0]);
        let v = verify_crash_stability(&f.system, &c0s, &f.goal, &p1, &p2).unwrap();
        let cex = v.counterexample().expect("unstable");
        assert_eq!((cex.deviator, cex.deviation_step), (Agent::Two, 0));
        // replays exactly
        assert_eq!(run.trajectory.configs, cex.trajectory.configs);
        let replay = execute_open(&f.system, cex.c0, &cex.actions, Some(&f.goal)).unwrap();
        assert_eq!(replay, cex.trajectory);
    }

    #[test]
    fn divert_is_stable() {
        let f = fixtures::sys_b_crash_divert();
        let (p1, p2) = lifted(&f);
        let c0s = InitialSet::single(f.init[0]);
        assert!(verify_crash_stability(&f.system, &c0s, &f.goal, &p1, &p2)
            .unwrap()
            .is_stable());
    }

    #[test]
    fn null_equal_to_plan_is_stable() {
        let mut b = SystemBuilder::new();
        b.states(Agent::One, ["u0", "u1"])
            .states(Agent::Two, ["v0", "v1"])
            .env(["e"])
            .actions(Agent::One, ["go", "null"])
            .actions(Agent::Two, ["go", "null"]);
        for s in ["u0", "u1"] {
            b.available(Agent::One, s, ["go", "null"]);
        }
        for s in ["v0", "v1"] {
            b.available(Agent::Two, s, ["go", "null"]);
        }
        for s1 in ["u0", "u1"] {
            for s2 in ["v0", "v1"] {
                for a1 in ["go", "null"] {
                    for a2 in ["go", "null"] {
                        b.transition([s1, s2, "e"], [a1, a2], ["u1", "v1", "e"]);
                    }
                }
            }
        }
        let system = b.build_valid().unwrap();
        let c0 = system.config_named("u0", "v0", "e").unwrap();
        let goal = GoalSet::single(system.config_named("u1", "v1", "e").unwrap());
        let plan = JointOpenPlan::named(&system, &["go"], &["go"]).unwrap();
        let (p1, p2) = (lift(&plan, Agent::One), lift(&plan, Agent::Two));
        for s in crash_scenarios(1) {
            let run = crash_run(&system, c0, &p1, &p2, s).unwrap();
            assert!(goal.contains(run.trajectory.last()));
        }
        assert!(
            verify_crash_stability(&system, &InitialSet::single(c0), &goal, &p1, &p2)
                .unwrap()
                .is_stable()
        );
    }

    #[test]
    fn missing_null_row() {
        let f = fixtures::sys_b();
        let (p1, p2) = lifted(&f);
        let scenario = CrashScenario {
            crasher: Agent::Two,
            time: 0,
        };
        assert!(matches!(
            crash_run(&f.system, f.init[0], &p1, &p2, scenario),
            Err(Error::NullRequired {
                step: Some(0),
                agent: Agent::Two,
                ..
            })
        ));
    }

    #[test]
    fn off_track_healthy_agent_stops() {
        // agent 2 may only play `go` in v0 and `stay` in v1; agent 1 crashing
        // keeps agent 2 in v0 where its planned `stay` is unavailable
        let mut b = SystemBuilder::new();
        b.states(Agent::One, ["u0", "u1"])
            .states(Agent::Two, ["v0", "v1", "v2"])
            .env(["e"])
            .actions(Agent::One, ["go", "null"])
            .actions(Agent::Two, ["go", "stay"]);
        for s in ["u0", "u1"] {
            b.available(Agent::One, s, ["go", "null"]);
        }
        b.available(Agent::Two, "v0", ["go"])
            .available(Agent::Two, "v1", ["stay"])
            .available(Agent::Two, "v2", ["go", "stay"]);
        for s1 in ["u0", "u1"] {
            for (s2, a2s) in [
                ("v0", vec!["go"]),
                ("v1", vec!["stay"]),
                ("v2", vec!["go", "stay"]),
            ] {
                for a2 in a2s {
                    b.transition(
                        [s1, s2, "e"],
                        ["go", a2],
                        ["u1", if s2 == "v0" { "v1" } else { "v2" }, "e"],
                    );
                    b.transition([s1, s2, "e"], ["null", a2], [s1, "v0", "e"]);
                }
            }
        }
        let system = b.build_valid().unwrap();
        let c0 = system.config_named("u0", "v0", "e").unwrap();
        let goal = GoalSet::single(system.config_named("u1", "v2", "e").unwrap());
        let plan = JointOpenPlan::named(&system, &["go", "go"], &["go", "stay"]).unwrap();
        let (p1, p2) = (lift(&plan, Agent::One), lift(&plan, Agent::Two));
        let scenario = CrashScenario {
            crasher: Agent::One,
            time: 0,
        };
        let run = crash_run(&system, c0, &p1, &p2, scenario).unwrap();
        assert_eq!(run.len(), 1);
        assert!(!goal.contains(run.trajectory.last()));
    }

    #[test]
    fn scenario_count() {
        assert_eq!(crash_scenarios(4).len(), 8);
        assert_eq!(crash_scenarios(0).len(), 0);
    }
}
