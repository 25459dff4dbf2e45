use super::cnf::{Assignment, Cnf};
use super::Instance;
use crate::error::{Error, Result};
use crate::model::{ActionId, Agent, Config, EnvId, GoalSet, JointOpenPlan, StateId, SystemModel};

// Agent 1 states: s0..s_{n+1}, then p, q.
// Agent 2 states: r0, rg, r1..rm, then o.
// Agent 1 actions: a, pos_1, neg_1, ..., pos_n, neg_n, observe, null.
// Agent 2 actions: d, d_1..d_m, null.
struct Layout {
    n: usize,
    m: usize,
}

impl Layout {
    fn s(&self, i: usize) -> StateId {
        StateId(i as u32)
    }
    fn p(&self) -> StateId {
        StateId(self.n as u32 + 2)
    }
    fn q(&self) -> StateId {
        StateId(self.n as u32 + 3)
    }
    fn r0(&self) -> StateId {
        StateId(0)
    }
    fn rg(&self) -> StateId {
        StateId(1)
    }
    fn r(&self, j: usize) -> StateId {
        StateId(j as u32 + 1)
    }
    fn o(&self) -> StateId {
        StateId(self.m as u32 + 2)
    }
    fn a(&self) -> ActionId {
        ActionId(0)
    }
    fn lit(&self, var: usize, positive: bool) -> ActionId {
        ActionId((2 * var - usize::from(positive)) as u32)
    }
    fn observe(&self) -> ActionId {
        ActionId(2 * self.n as u32 + 1)
    }
    fn null1(&self) -> ActionId {
        ActionId(2 * self.n as u32 + 2)
    }
    fn d(&self) -> ActionId {
        ActionId(0)
    }
    fn dj(&self, j: usize) -> ActionId {
        ActionId(j as u32)
    }
    fn null2(&self) -> ActionId {
        ActionId(self.m as u32 + 1)
    }
    /// The signed literal carried by an agent-1 action, if any.
    fn literal_of(&self, a: ActionId) -> Option<i32> {
        let i = a.0 as usize;
        (1..=2 * self.n).contains(&i).then(|| {
            let var = i.div_ceil(2) as i32;
            if i % 2 == 1 {
                var
            } else {
                -var
            }
        })
    }
}

/// Builds the two-agent system whose stable plans correspond to satisfying
/// assignments of `cnf`.
///
/// Agent 1 walks through the variables choosing a literal action for each,
/// then observes. Agent 2 either heads straight to the goal with `d` or,
/// by deviating with `d_j`, waits in `r_j` for agent 1 to play a literal of
/// clause `j`. Agent 1's final observation reveals whether agent 2 was
/// released to `o`, so a deviation is detected exactly when the chosen
/// assignment satisfies clause `j`.
pub fn reduce_3sat(cnf: &Cnf) -> Instance {
    let (n, m) = (cnf.num_vars(), cnf.num_clauses());
    let l = Layout { n, m };

    let mut states1: Vec<String> = (0..=n + 1).map(|i| format!("s{i}")).collect();
    states1.extend(["p".into(), "q".into()]);
    let mut states2: Vec<String> = vec!["r0".into(), "rg".into()];
    states2.extend((1..=m).map(|j| format!("r{j}")));
    states2.push("o".into());
    let mut actions1: Vec<String> = vec!["a".into()];
    for i in 1..=n {
        actions1.push(format!("pos_{i}"));
        actions1.push(format!("neg_{i}"));
    }
    actions1.extend(["observe".into(), "null".into()]);
    let mut actions2: Vec<String> = vec!["d".into()];
    actions2.extend((1..=m).map(|j| format!("d_{j}")));
    actions2.push("null".into());

    let mut system = SystemModel::new(states1, states2, vec!["e".into()], actions1, actions2)
        .expect("generated names are distinct identifiers");

    system.set_available(Agent::One, l.s(0), &[l.a()]);
    for i in 1..=n {
        system.set_available(Agent::One, l.s(i), &[l.lit(i, true), l.lit(i, false)]);
    }
    system.set_available(Agent::One, l.s(n + 1), &[l.observe()]);
    system.set_available(Agent::One, l.p(), &[l.null1()]);
    system.set_available(Agent::One, l.q(), &[l.null1()]);
    let mut first2 = vec![l.d()];
    first2.extend((1..=m).map(|j| l.dj(j)));
    system.set_available(Agent::Two, l.r0(), &first2);
    for s2 in 1..system.num_states(Agent::Two) {
        system.set_available(Agent::Two, StateId(s2 as u32), &[l.null2()]);
    }

    let e = EnvId(0);
    for c in system.configs().collect::<Vec<_>>() {
        let acts1 = system.available(Agent::One, c.s1).to_vec();
        let acts2 = system.available(Agent::Two, c.s2).to_vec();
        for &a1 in &acts1 {
            for &a2 in &acts2 {
                let s1 = if a1 == l.a() {
                    l.s(1)
                } else if a1 == l.observe() {
                    if c.s2 == l.o() {
                        l.q()
                    } else {
                        l.p()
                    }
                } else if a1 == l.null1() {
                    c.s1
                } else {
                    StateId(c.s1.0 + 1)
                };
                let s2 = if c.s2 == l.r0() {
                    if a2 == l.d() {
                        l.rg()
                    } else {
                        l.r(a2.0 as usize)
                    }
                } else if c.s2 == l.rg() || c.s2 == l.o() {
                    c.s2
                } else {
                    let j = c.s2.0 as usize - 1;
                    let hit = l
                        .literal_of(a1)
                        .is_some_and(|lit| cnf.clauses()[j - 1].contains(&lit));
                    if hit {
                        l.o()
                    } else {
                        c.s2
                    }
                };
                system.insert_transition(c, a1, a2, Config::new(s1, s2, e));
            }
        }
    }

    let c0 = Config::new(l.s(0), l.r0(), e);
    let goal = GoalSet::single(Config::new(l.s(1), l.rg(), e));
    Instance { system, c0, goal }
}

/// The honest plan for an assignment: agent 1 plays `a`, one literal per
/// variable and `observe`; agent 2 plays `d` and then `null`.
pub fn assignment_to_plan(cnf: &Cnf, assignment: &Assignment) -> Result<JointOpenPlan> {
    let (n, m) = (cnf.num_vars(), cnf.num_clauses());
    let l = Layout { n, m };
    let mut p1 = vec![l.a()];
    for var in 1..=n {
        let value = *assignment
            .get(&var)
            .ok_or(Error::PartialAssignment { var })?;
        p1.push(l.lit(var, value));
    }
    p1.push(l.observe());
    let mut p2 = vec![l.d()];
    p2.extend(std::iter::repeat_n(l.null2(), n + 1));
    JointOpenPlan::new(p1, p2)
}
