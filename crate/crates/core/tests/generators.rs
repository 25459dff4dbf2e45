use stable_plans::format::{parse_system, serialize_system, SystemFile};
use stable_plans::generators::{
    assignment_to_plan, gen_grid, parse_dimacs, reduce_3sat, Assignment, Cnf,
};
use stable_plans::model::{execute_open, Agent, JointOpenPlan, SystemModel};
use stable_plans::stability::verify_stable;
use stable_plans::synth::{sjpp_solve, SynthBudget, Synthesis};

#[test]
fn reduction_sizes() {
    for (n, m) in [(1, 1), (3, 2), (5, 6)] {
        let clauses: Vec<[i32; 3]> = (0..m)
            .map(|j| [1, -(n as i32), (j % n + 1) as i32])
            .collect();
        let inst = reduce_3sat(&Cnf::new(n, clauses).unwrap());
        assert_eq!(inst.system.num_states(Agent::One), n + 4);
        assert_eq!(inst.system.num_states(Agent::Two), m + 3);
        assert_eq!(inst.system.num_env(), 1);
        assert!(inst.system.validate().is_empty());
    }
}

#[test]
fn single_positive_literal_trajectory() {
    let cnf = Cnf::padded(1, &[vec![1]]).unwrap();
    let inst = reduce_3sat(&cnf);
    let plan = assignment_to_plan(&cnf, &Assignment::from([(1, true)])).unwrap();
    assert_eq!(
        plan.show(&inst.system),
        "agent1: a pos_1 observe\nagent2: d null null\n"
    );
    let run = execute_open(&inst.system, inst.c0, &plan, Some(&inst.goal)).unwrap();
    let shown: Vec<String> = run.configs.iter().map(|&c| inst.system.show(c)).collect();
    assert_eq!(shown, ["(s0,r0,e)", "(s1,rg,e)", "(s2,rg,e)", "(p,rg,e)"]);
    assert!(verify_stable(&inst.system, inst.c0, &inst.goal, &plan)
        .unwrap()
        .is_stable());
    let plan = assignment_to_plan(&cnf, &Assignment::from([(1, false)])).unwrap();
    assert!(!verify_stable(&inst.system, inst.c0, &inst.goal, &plan)
        .unwrap()
        .is_stable());
}

#[test]
fn reduction_survives_text_round_trip() {
    let cnf = parse_dimacs("p cnf 3 3\n1 -2 3 0\n-1 2 0\n-3 0\n").unwrap();
    let file: SystemFile = reduce_3sat(&cnf).into();
    let text = serialize_system(&file);
    let back = parse_system(&text).unwrap();
    assert_eq!(back, file);
    assert_eq!(serialize_system(&back), text);
}

/// Every plan of length `1..=horizon` using actions available along its run.
fn all_plans(
    system: &SystemModel,
    c0: stable_plans::model::Config,
    horizon: usize,
) -> Vec<JointOpenPlan> {
    let mut out = Vec::new();
    let mut frontier = vec![(JointOpenPlan::default(), c0)];
    for _ in 0..horizon {
        let mut next = Vec::new();
        for (prefix, c) in frontier {
            for &a1 in system.available(Agent::One, c.s1) {
                for &a2 in system.available(Agent::Two, c.s2) {
                    let mut p = prefix.clone();
                    p.push((a1, a2));
                    next.push((p, system.step(c, a1, a2).unwrap()));
                }
            }
        }
        out.extend(next.iter().map(|(p, _)| p.clone()));
        frontier = next;
    }
    out
}

#[test]
fn grid_swap_matches_enumeration() {
    // the agents trade corners of a 2x2 grid
    let inst = gen_grid(2, 2, (0, 0), (1, 1), (1, 1), (0, 0)).unwrap();
    let horizon = 3;
    let budget = SynthBudget {
        max_len: Some(horizon),
        ..SynthBudget::default()
    };
    let found = sjpp_solve(&inst.system, inst.c0, &inst.goal, &budget).unwrap();
    let shortest = all_plans(&inst.system, inst.c0, horizon)
        .into_iter()
        .filter(|p| {
            verify_stable(&inst.system, inst.c0, &inst.goal, p)
                .unwrap()
                .is_stable()
        })
        .map(|p| p.len())
        .min();
    assert_eq!(found.plan().map(|p| p.len()), shortest);
    let Synthesis::Found(plan) = found else {
        panic!("a stable swap exists")
    };
    // the swap completes after two steps, yet no two-step plan is stable
    assert_eq!(
        plan.show(&inst.system),
        "agent1: down right up\nagent2: up left down\n"
    );
    let run = execute_open(&inst.system, inst.c0, &plan, Some(&inst.goal)).unwrap();
    assert_eq!(run.goal_visited, Some(2));
    assert!(verify_stable(&inst.system, inst.c0, &inst.goal, &plan)
        .unwrap()
        .is_stable());
}
