use super::super::stability::{Counterexample, Instability, StabilityVerdict};
use crate::error::Result;
use crate::model::{
    check_efficient, execute_open, joint, ActionId, Agent, Config, Efficiency, GoalSet,
    JointAction, JointOpenPlan, SystemModel,
};

/// Searches for a deviator action sequence over `window` (the detector plays
/// its window actions) whose first step lands on a configuration different
/// from the nominal one, while the detector's own state matches the nominal
/// window run at every later step.
pub(crate) fn find_undetected(
    system: &SystemModel,
    start: Config,
    window: &[JointAction],
    deviator: Agent,
) -> Result<Option<Vec<ActionId>>> {
    let detector = deviator.other();
    let mut nominal = Vec::with_capacity(window.len() + 1);
    nominal.push(start);
    for &(a1, a2) in window {
        let c = *nominal.last().expect("nonempty");
        nominal.push(system.step(c, a1, a2)?);
    }
    let mut path = Vec::with_capacity(window.len());
    let found = dfs(
        system, window, deviator, detector, &nominal, 0, start, &mut path,
    )?;
    Ok(found.then_some(path))
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    system: &SystemModel,
    window: &[JointAction],
    deviator: Agent,
    detector: Agent,
    nominal: &[Config],
    u: usize,
    c: Config,
    path: &mut Vec<ActionId>,
) -> Result<bool> {
    if u == window.len() {
        return Ok(true);
    }
    let own = crate::model::action_of(window[u], detector);
    for &e in system.available(deviator, c.state(deviator)) {
        let (a1, a2) = joint(deviator, e, own);
        let next = system.step(c, a1, a2)?;
        // the first step must actually change the configuration
        if u == 0 && next == nominal[1] {
            continue;
        }
        if next.state(detector) != nominal[u + 1].state(detector) {
            continue;
        }
        path.push(e);
        if dfs(
            system,
            window,
            deviator,
            detector,
            nominal,
            u + 1,
            next,
            path,
        )? {
            return Ok(true);
        }
        path.pop();
    }
    Ok(false)
}

/// `true` when every configuration-changing deviation by `deviator` from
/// the window's first joint action is detected while the other agent plays
/// the rest of its window actions.
pub fn window_deviation_check(
    system: &SystemModel,
    config: Config,
    window: &[JointAction],
    deviator: Agent,
) -> Result<bool> {
    Ok(find_undetected(system, config, window, deviator)?.is_none())
}

/// Checks that a deviation at any time `m` is detected no later than
/// `min(m + k + 1, t)`.
///
/// Deviations starting once the goal has been visited are exempt, matching
/// the window checks the synthesis algorithm performs.
pub fn verify_kstable(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    plan: &JointOpenPlan,
    k: usize,
) -> Result<StabilityVerdict> {
    let goal_step = match check_efficient(system, c0, goal, plan)? {
        Efficiency::Efficient { goal_step } => goal_step,
        Efficiency::Inefficient(why) => {
            return Ok(StabilityVerdict::Unstable(Instability::NotEfficient(why)))
        }
    };
    let honest = execute_open(system, c0, plan, None)?;
    let t = plan.len();
    let steps: Vec<JointAction> = plan.steps().collect();
    for deviator in Agent::BOTH {
        let detector = deviator.other();
        for m in 0..t.min(goal_step) {
            let end = (m + k + 1).min(t);
            let Some(seq) = find_undetected(system, honest.configs[m], &steps[m..end], deviator)?
            else {
                continue;
            };
            let mut taken: Vec<JointAction> = steps[..m].to_vec();
            taken.extend(
                seq.iter()
                    .zip(&steps[m..end])
                    .map(|(&e, &s)| joint(deviator, e, crate::model::action_of(s, detector))),
            );
            let actions = JointOpenPlan::from_joint(&taken);
            let trajectory = execute_open(system, c0, &actions, Some(goal))?;
            return Ok(StabilityVerdict::undetected(Counterexample {
                deviator,
                c0,
                actions,
                trajectory,
                deviation_step: m,
                witness: None,
            }));
        }
    }
    Ok(StabilityVerdict::Stable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn first_window(f: &crate::format::SystemFile) -> Vec<JointAction> {
        fixtures::plan_a(f).steps().collect()
    }

    #[test]
    fn sys_b_window_detects() {
        let f = fixtures::sys_b();
        let w = first_window(&f);
        assert!(window_deviation_check(&f.system, f.init[0], &w, Agent::Two).unwrap());
        assert!(window_deviation_check(&f.system, f.init[0], &w, Agent::One).unwrap());
    }

    #[test]
    fn sys_a_window_misses() {
        let f = fixtures::sys_a();
        let w = first_window(&f);
        assert!(!window_deviation_check(&f.system, f.init[0], &w, Agent::Two).unwrap());
    }

    #[test]
    fn singleton_availability_passes() {
        let f = fixtures::sys_c();
        let w = first_window(&f);
        for d in Agent::BOTH {
            assert!(window_deviation_check(&f.system, f.init[0], &w, d).unwrap());
        }
    }

    #[test]
    fn kstable_fixture_verdicts() {
        let b = fixtures::sys_b();
        assert!(
            verify_kstable(&b.system, b.init[0], &b.goal, &fixtures::plan_a(&b), 0)
                .unwrap()
                .is_stable()
        );

        let d = fixtures::sys_d();
        let plan = fixtures::plan_d(&d);
        let v0 = verify_kstable(&d.system, d.init[0], &d.goal, &plan, 0).unwrap();
        let cex = v0.counterexample().expect("k=0 misses the late divergence");
        assert_eq!(cex.deviator, Agent::Two);
        assert_eq!(cex.deviation_step, 0);
        assert!(verify_kstable(&d.system, d.init[0], &d.goal, &plan, 1)
            .unwrap()
            .is_stable());

        let c = fixtures::sys_c();
        for k in 0..3 {
            assert!(
                verify_kstable(&c.system, c.init[0], &c.goal, &fixtures::plan_a(&c), k)
                    .unwrap()
                    .is_stable()
            );
        }
    }
}
