use super::graph::{build_window_graph_with, WindowGraph, WindowOptions};
use crate::error::Result;
use crate::model::{is_goal, Agent, Config, GoalSet, JointAction, JointOpenPlan, SystemModel};
use crate::synth::Synthesis;

/// Synthesizes a k-stable joint plan over the window graph.
///
/// Base nodes are those whose first joint action enters the goal and whose
/// window detects first-step deviations. Goodness then flows backwards along
/// edges. Edges only connect time `τ` to `τ + 1`, so one sweep over the nodes
/// in reverse creation order reaches the fixpoint.
///
/// The returned plan is the first joint action of every node on a good chain
/// followed by the remaining actions of the final window, which keep both
/// agents acting long enough for the last deviation to be detected.
pub fn sjpa(system: &SystemModel, c0: Config, goal: &GoalSet, k: usize) -> Result<Synthesis> {
    sjpa_with(system, c0, goal, k, &WindowOptions::default())
}

pub fn sjpa_with(
    system: &SystemModel,
    c0: Config,
    goal: &GoalSet,
    k: usize,
    opts: &WindowOptions,
) -> Result<Synthesis> {
    if is_goal(goal, c0) {
        // Every plan visits the goal at time 0 and all deviations are exempt;
        // the shortest available plan will do.
        let a1 = system.available(Agent::One, c0.s1)[0];
        let a2 = system.available(Agent::Two, c0.s2)[0];
        return Ok(Synthesis::Found(JointOpenPlan::from_joint(&[(a1, a2)])));
    }
    let graph = build_window_graph_with(system, c0, goal, k, opts)?;
    Ok(match extract(&graph, &mark(&graph)) {
        Some(plan) => Synthesis::Found(plan),
        None => Synthesis::NotFound,
    })
}

/// Goodness of every node of the graph.
pub fn mark(graph: &WindowGraph) -> Vec<bool> {
    let mut good = vec![false; graph.nodes.len()];
    for id in (0..graph.nodes.len()).rev() {
        good[id] = graph.detectable[id]
            && (graph.reaches_goal[id] || graph.successors(id).iter().any(|&s| good[s]));
    }
    good
}

fn extract(graph: &WindowGraph, good: &[bool]) -> Option<JointOpenPlan> {
    let mut node = (0..graph.nodes.len()).find(|&i| graph.nodes[i].time == 0 && good[i])?;
    let mut steps: Vec<JointAction> = Vec::new();
    loop {
        let n = &graph.nodes[node];
        if graph.reaches_goal[node] {
            steps.extend_from_slice(&n.window);
            return Some(JointOpenPlan::from_joint(&steps));
        }
        steps.push(n.window[0]);
        node = *graph
            .successors(node)
            .iter()
            .find(|&&s| good[s])
            .expect("good non-base node has a good successor");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kstable::verify_kstable;
    use crate::stability::verify_stable;

    #[test]
    fn sys_b_k0_found() {
        let f = fixtures::sys_b();
        let r = sjpa(&f.system, f.init[0], &f.goal, 0).unwrap();
        assert_eq!(r, Synthesis::Found(fixtures::plan_a(&f)));
    }

    #[test]
    fn sys_a_k0_not_found() {
        let f = fixtures::sys_a();
        assert_eq!(
            sjpa(&f.system, f.init[0], &f.goal, 0).unwrap(),
            Synthesis::NotFound
        );
    }

    #[test]
    fn sys_d_needs_k1() {
        let f = fixtures::sys_d();
        assert_eq!(
            sjpa(&f.system, f.init[0], &f.goal, 0).unwrap(),
            Synthesis::NotFound
        );
        let Synthesis::Found(plan) = sjpa(&f.system, f.init[0], &f.goal, 1).unwrap() else {
            panic!("k=1 plan expected");
        };
        assert_eq!(plan, fixtures::plan_d(&f));
        assert!(verify_kstable(&f.system, f.init[0], &f.goal, &plan, 1)
            .unwrap()
            .is_stable());
        assert!(verify_stable(&f.system, f.init[0], &f.goal, &plan)
            .unwrap()
            .is_stable());
    }
}
