use proptest::prelude::*;

use stable_plans::fixtures;
use stable_plans::format::{parse_plan, parse_system, serialize_plan, serialize_system};
use stable_plans::generators::{gen_random_with_plan, RandomSizes};
use stable_plans::model::{
    check_efficient, execute_open, Agent, Efficiency, Inefficiency, JointOpenPlan,
};
use stable_plans::stability::{brute_force_verify, verify_detection, verify_stable};
use stable_plans::Error;

#[test]
fn sys_a_run_reaches_goal_in_one_step() {
    let f = fixtures::sys_a();
    let plan = fixtures::plan_a(&f);
    let run = execute_open(&f.system, f.init[0], &plan, Some(&f.goal)).unwrap();
    let shown: Vec<String> = run.configs.iter().map(|&c| f.system.show(c)).collect();
    assert_eq!(shown, ["(u0,v0,e)", "(u1,v1,e)"]);
    assert_eq!(run.goal_visited, Some(1));
}

#[test]
fn empty_plan_rejected() {
    let f = fixtures::sys_a();
    assert_eq!(
        execute_open(&f.system, f.init[0], &JointOpenPlan::default(), None),
        Err(Error::EmptyPlan)
    );
}

#[test]
fn too_long_plan_is_inefficient() {
    let f = fixtures::sys_a();
    let bound = f.system.num_configs();
    let go = vec!["go"; bound + 1];
    let good = vec!["good"; bound + 1];
    let plan = JointOpenPlan::named(&f.system, &go, &good).unwrap();
    assert_eq!(
        check_efficient(&f.system, f.init[0], &f.goal, &plan).unwrap(),
        Efficiency::Inefficient(Inefficiency::TooLong {
            len: bound + 1,
            bound
        })
    );
    let plan = JointOpenPlan::named(&f.system, &go[..bound], &good[..bound]).unwrap();
    assert!(check_efficient(&f.system, f.init[0], &f.goal, &plan)
        .unwrap()
        .is_efficient());
}

#[test]
fn sys_a_unstable_sys_b_stable() {
    let a = fixtures::sys_a();
    let plan = fixtures::plan_a(&a);
    let v = verify_stable(&a.system, a.init[0], &a.goal, &plan).unwrap();
    assert_eq!(v.direction(), Some(Agent::Two));
    let b = fixtures::sys_b();
    assert!(verify_stable(&b.system, b.init[0], &b.goal, &plan)
        .unwrap()
        .is_stable());
}

#[test]
fn fixtures_round_trip_through_text() {
    for f in [
        fixtures::sys_a(),
        fixtures::sys_b(),
        fixtures::sys_d(),
        fixtures::two_env(),
    ] {
        let text = serialize_system(&f);
        assert_eq!(parse_system(&text).unwrap(), f);
    }
    let d = fixtures::sys_d();
    let plan = fixtures::plan_d(&d);
    assert_eq!(
        parse_plan(&d.system, &serialize_plan(&d.system, &plan)).unwrap(),
        plan
    );
}

#[test]
fn plan_length_mismatch() {
    let f = fixtures::sys_a();
    assert!(matches!(
        parse_plan(&f.system, "agent1: go go\nagent2: good\n"),
        Err(Error::LengthMismatch { len1: 2, len2: 1 })
    ));
}

fn instance() -> impl Strategy<Value = (u64, RandomSizes, usize)> {
    (
        any::<u64>(),
        1usize..=4,
        1usize..=4,
        1usize..=3,
        1usize..=3,
        1usize..=3,
        1usize..=6,
    )
        .prop_map(|(seed, s1, s2, b, a1, a2, len)| {
            let sizes = RandomSizes {
                states1: s1,
                states2: s2,
                env: b,
                actions1: a1,
                actions2: a2,
                ..RandomSizes::default()
            };
            (seed, sizes, len)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn execution_is_deterministic_and_coherent((seed, sizes, len) in instance()) {
        let (inst, plan) = gen_random_with_plan(seed, &sizes, len).unwrap();
        let a = execute_open(&inst.system, inst.c0, &plan, Some(&inst.goal)).unwrap();
        let b = execute_open(&inst.system, inst.c0, &plan, Some(&inst.goal)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.configs.len(), plan.len() + 1);
        for (u, (a1, a2)) in plan.steps().enumerate() {
            prop_assert_eq!(inst.system.step(a.configs[u], a1, a2).unwrap(), a.configs[u + 1]);
        }
    }

    #[test]
    fn goal_visit_survives_extension((seed, sizes, len) in instance()) {
        let (inst, mut plan) = gen_random_with_plan(seed, &sizes, len).unwrap();
        let first = execute_open(&inst.system, inst.c0, &plan, Some(&inst.goal)).unwrap().goal_visited;
        prop_assert!(first.is_some());
        let last = execute_open(&inst.system, inst.c0, &plan, None).unwrap().last();
        let a1 = inst.system.available(Agent::One, last.s1)[0];
        let a2 = inst.system.available(Agent::Two, last.s2)[0];
        plan.push((a1, a2));
        let extended = execute_open(&inst.system, inst.c0, &plan, Some(&inst.goal)).unwrap();
        prop_assert_eq!(extended.goal_visited, first);
    }

    #[test]
    fn generated_plans_are_efficient((seed, sizes, len) in instance()) {
        let (inst, plan) = gen_random_with_plan(seed, &sizes, len).unwrap();
        prop_assert!(plan.len() <= inst.system.num_configs());
        prop_assert!(check_efficient(&inst.system, inst.c0, &inst.goal, &plan).unwrap().is_efficient());
    }

    #[test]
    fn detection_matches_brute_force((seed, sizes, len) in instance()) {
        let (inst, plan) = gen_random_with_plan(seed, &sizes, len).unwrap();
        for deviator in Agent::BOTH {
            let fast = verify_detection(&inst.system, inst.c0, &inst.goal, &plan, deviator).unwrap();
            let slow = brute_force_verify(&inst.system, inst.c0, &inst.goal, &plan, deviator).unwrap();
            prop_assert_eq!(fast.is_stable(), slow.is_stable());
        }
    }
}
