use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::error::{Error, Result};
use crate::model::{
    check_efficient, execute_open, ActionId, Agent, Config, EnvId, GoalPattern, GoalSet,
    JointOpenPlan, StateId, SystemModel,
};

/// Shape of a random system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSizes {
    pub states1: usize,
    pub states2: usize,
    pub env: usize,
    pub actions1: usize,
    pub actions2: usize,
    pub goal_patterns: usize,
    /// Probability that a transition ignores the agents' local dynamics and
    /// jumps to a uniformly random configuration.
    pub coupling: f64,
    /// Declare `null` for both agents in every state, with transitions like
    /// any other action.
    pub with_null: bool,
}

impl Default for RandomSizes {
    fn default() -> Self {
        RandomSizes {
            states1: 3,
            states2: 3,
            env: 2,
            actions1: 2,
            actions2: 2,
            goal_patterns: 1,
            coupling: 0.3,
            with_null: false,
        }
    }
}

fn check_sizes(sizes: &RandomSizes) -> Result<()> {
    let counts = [
        ("agent 1 states", sizes.states1),
        ("agent 2 states", sizes.states2),
        ("environment states", sizes.env),
        ("agent 1 actions", sizes.actions1),
        ("agent 2 actions", sizes.actions2),
    ];
    for (what, n) in counts {
        if n == 0 {
            return Err(Error::OutOfRange {
                what,
                detail: "must be positive".into(),
            });
        }
    }
    if !(0.0..=1.0).contains(&sizes.coupling) {
        return Err(Error::OutOfRange {
            what: "coupling",
            detail: format!("{} not in [0, 1]", sizes.coupling),
        });
    }
    Ok(())
}

fn random_pattern<R: Rng>(rng: &mut R, c: Config) -> GoalPattern {
    GoalPattern {
        s1: (!rng.gen_bool(0.25)).then_some(c.s1),
        s2: (!rng.gen_bool(0.25)).then_some(c.s2),
        b: (!rng.gen_bool(0.5)).then_some(c.b),
    }
}

/// A random system with a total deterministic transition table.
///
/// Each agent has its own local successor function over `(state, action)`
/// and the environment drifts on its own; with probability `coupling` a
/// transition instead goes to a uniformly random configuration. Every state
/// offers a random nonempty subset of the actions. The initial configuration
/// is `(0, 0, 0)` and the goal has `goal_patterns` random patterns, each
/// wildcarding components at random.
///
/// The same seed and sizes always give the same instance.
pub fn gen_random(seed: u64, sizes: &RandomSizes) -> Result<Instance> {
    check_sizes(sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = |prefix: &str, n: usize| (0..n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>();
    let mut acts1 = names("a", sizes.actions1);
    let mut acts2 = names("b", sizes.actions2);
    if sizes.with_null {
        acts1.push("null".into());
        acts2.push("null".into());
    }
    let mut system = SystemModel::new(
        names("u", sizes.states1),
        names("v", sizes.states2),
        names("e", sizes.env),
        acts1,
        acts2,
    )?;
    let counts = [sizes.states1, sizes.states2];
    let plain = [sizes.actions1, sizes.actions2];

    for agent in Agent::BOTH {
        for s in 0..counts[agent.index()] {
            let mut avail: Vec<ActionId> = (0..plain[agent.index()] as u32)
                .filter(|_| rng.gen_bool(0.6))
                .map(ActionId)
                .collect();
            if avail.is_empty() {
                avail.push(ActionId(rng.gen_range(0..plain[agent.index()]) as u32));
            }
            if sizes.with_null {
                avail.push(ActionId(plain[agent.index()] as u32));
            }
            system.set_available(agent, StateId(s as u32), &avail);
        }
    }

    let total = [
        system.num_actions(Agent::One),
        system.num_actions(Agent::Two),
    ];
    let local: [Vec<Vec<u32>>; 2] = std::array::from_fn(|i| {
        (0..counts[i])
            .map(|_| {
                (0..total[i])
                    .map(|_| rng.gen_range(0..counts[i]) as u32)
                    .collect()
            })
            .collect()
    });
    let drift: Vec<u32> = (0..sizes.env)
        .map(|b| {
            if rng.gen_bool(0.7) {
                b as u32
            } else {
                rng.gen_range(0..sizes.env) as u32
            }
        })
        .collect();

    for c in system.configs().collect::<Vec<_>>() {
        let av1 = system.available(Agent::One, c.s1).to_vec();
        let av2 = system.available(Agent::Two, c.s2).to_vec();
        for &a1 in &av1 {
            for &a2 in &av2 {
                let to = if rng.gen_bool(sizes.coupling) {
                    system.config_at(rng.gen_range(0..system.num_configs()))
                } else {
                    Config::new(
                        StateId(local[0][c.s1.0 as usize][a1.0 as usize]),
                        StateId(local[1][c.s2.0 as usize][a2.0 as usize]),
                        EnvId(drift[c.b.0 as usize]),
                    )
                };
                system.insert_transition(c, a1, a2, to);
            }
        }
    }

    let c0 = Config::new(StateId(0), StateId(0), EnvId(0));
    let patterns = (0..sizes.goal_patterns)
        .map(|_| {
            let c = system.config_at(rng.gen_range(0..system.num_configs()));
            random_pattern(&mut rng, c)
        })
        .collect();
    Ok(Instance {
        system,
        c0,
        goal: GoalSet::new(patterns),
    })
}

/// A plan of `len` steps choosing uniformly among available actions.
pub fn random_walk_plan<R: Rng + ?Sized>(
    rng: &mut R,
    system: &SystemModel,
    c0: Config,
    len: usize,
) -> Result<JointOpenPlan> {
    let mut plan = JointOpenPlan::default();
    let mut c = c0;
    for _ in 0..len {
        let a1 = *system
            .available(Agent::One, c.s1)
            .choose(rng)
            .expect("nonempty");
        let a2 = *system
            .available(Agent::Two, c.s2)
            .choose(rng)
            .expect("nonempty");
        c = system.step(c, a1, a2)?;
        plan.push((a1, a2));
    }
    Ok(plan)
}

/// A random instance together with an efficient plan for it.
///
/// The plan is a random walk of `plan_len` steps (clamped to `|C|`), and the
/// goal is replaced by one pattern covering a configuration the walk visits
/// after the first step, so the plan is efficient by construction. Other
/// configurations may match the pattern too.
pub fn gen_random_with_plan(
    seed: u64,
    sizes: &RandomSizes,
    plan_len: usize,
) -> Result<(Instance, JointOpenPlan)> {
    let mut inst = gen_random(seed, sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let len = plan_len.clamp(1, inst.system.num_configs());
    let plan = random_walk_plan(&mut rng, &inst.system, inst.c0, len)?;
    let run = execute_open(&inst.system, inst.c0, &plan, None)?;
    let at = rng.gen_range(1..=len);
    let pattern = random_pattern(&mut rng, run.configs[at]);
    inst.goal = GoalSet::new(vec![pattern]);
    debug_assert!(check_efficient(&inst.system, inst.c0, &inst.goal, &plan)?.is_efficient());
    Ok((inst, plan))
}
