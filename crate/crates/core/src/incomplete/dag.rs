use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{ActionId, Agent, JointOpenPlan, StateId, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// A decision node. `Act` plays `action`, then moves to the branch for the
/// agent's own new state, falling back to `default` (`on *`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlanNode {
    Act {
        action: ActionId,
        branches: BTreeMap<StateId, NodeId>,
        default: Option<NodeId>,
    },
    Halt,
}

impl PlanNode {
    fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        let (branches, default) = match self {
            PlanNode::Act {
                branches, default, ..
            } => (Some(branches), *default),
            PlanNode::Halt => (None, None),
        };
        branches
            .into_iter()
            .flat_map(|b| b.values().copied())
            .chain(default)
    }
}

/// One agent's conditional plan: a rooted acyclic graph of decision nodes
/// with halt leaves. Shared subplans are stored once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalPlanDag {
    nodes: Vec<PlanNode>,
    root: NodeId,
}

impl ConditionalPlanDag {
    /// Checks that every reference is in range and the graph is acyclic.
    pub fn new(nodes: Vec<PlanNode>, root: NodeId) -> Result<Self> {
        let n = nodes.len();
        if root.0 >= n {
            return Err(Error::Invalid(format!("root node {} out of range", root.0)));
        }
        for (i, node) in nodes.iter().enumerate() {
            if let Some(bad) = node.children().find(|c| c.0 >= n) {
                return Err(Error::Invalid(format!(
                    "node {i} refers to missing node {}",
                    bad.0
                )));
            }
        }
        if let Some(i) = find_cycle(&nodes) {
            return Err(Error::Invalid(format!(
                "plan graph has a cycle through node {i}"
            )));
        }
        Ok(ConditionalPlanDag { nodes, root })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &PlanNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[PlanNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The successor after observing `state`, if the node has one.
    pub fn next(&self, id: NodeId, state: StateId) -> Option<NodeId> {
        match &self.nodes[id.0] {
            PlanNode::Act {
                branches, default, ..
            } => branches.get(&state).copied().or(*default),
            PlanNode::Halt => Some(id),
        }
    }

    /// Longest root-to-halt path, in actions.
    pub fn depth(&self) -> usize {
        let mut memo: Vec<Option<usize>> = vec![None; self.nodes.len()];
        fn go(d: &ConditionalPlanDag, id: NodeId, memo: &mut [Option<usize>]) -> usize {
            if let Some(v) = memo[id.0] {
                return v;
            }
            let v = match d.node(id) {
                PlanNode::Halt => 0,
                n => 1 + n.children().map(|c| go(d, c, memo)).max().unwrap_or(0),
            };
            memo[id.0] = Some(v);
            v
        }
        go(self, self.root, &mut memo)
    }

    /// Maximal sharing: structurally equal subplans are merged, branches that
    /// repeat the default are dropped, unreachable nodes removed, and nodes
    /// numbered in depth-first preorder from the root.
    pub fn canonicalize(&self) -> ConditionalPlanDag {
        let mut class_of: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut interned: HashMap<PlanNode, usize> = HashMap::new();
        let mut classes: Vec<PlanNode> = Vec::new();

        // post-order over reachable nodes
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if class_of[id.0].is_some() {
                continue;
            }
            if !expanded {
                stack.push((id, true));
                for c in self.nodes[id.0].children() {
                    if class_of[c.0].is_none() {
                        stack.push((c, false));
                    }
                }
                continue;
            }
            let key = match &self.nodes[id.0] {
                PlanNode::Halt => PlanNode::Halt,
                PlanNode::Act {
                    action,
                    branches,
                    default,
                } => {
                    let map = |c: &NodeId| NodeId(class_of[c.0].expect("child interned first"));
                    let default = default.as_ref().map(map);
                    let branches = branches
                        .iter()
                        .map(|(s, c)| (*s, map(c)))
                        .filter(|(_, c)| Some(*c) != default)
                        .collect();
                    PlanNode::Act {
                        action: *action,
                        branches,
                        default,
                    }
                }
            };
            let class = *interned.entry(key.clone()).or_insert_with(|| {
                classes.push(key);
                classes.len() - 1
            });
            class_of[id.0] = Some(class);
        }

        let root = class_of[self.root.0].expect("root interned");
        let mut order: Vec<Option<usize>> = vec![None; classes.len()];
        let mut sequence = Vec::new();
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            if order[c].is_some() {
                continue;
            }
            order[c] = Some(sequence.len());
            sequence.push(c);
            let children: Vec<NodeId> = classes[c].children().collect();
            for child in children.into_iter().rev() {
                if order[child.0].is_none() {
                    stack.push(child.0);
                }
            }
        }
        let renumber = |c: &NodeId| NodeId(order[c.0].expect("reachable"));
        let nodes = sequence
            .iter()
            .map(|&c| match &classes[c] {
                PlanNode::Halt => PlanNode::Halt,
                PlanNode::Act {
                    action,
                    branches,
                    default,
                } => PlanNode::Act {
                    action: *action,
                    branches: branches.iter().map(|(s, n)| (*s, renumber(n))).collect(),
                    default: default.as_ref().map(renumber),
                },
            })
            .collect();
        ConditionalPlanDag {
            nodes,
            root: NodeId(0),
        }
    }
}

fn find_cycle(nodes: &[PlanNode]) -> Option<usize> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; nodes.len()];
    for start in 0..nodes.len() {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> =
            vec![(start, nodes[start].children().map(|c| c.0).collect())];
        color[start] = 1;
        while let Some((id, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(c) if color[c] == 1 => return Some(c),
                Some(c) if color[c] == 0 => {
                    color[c] = 1;
                    let next = nodes[c].children().map(|x| x.0).collect();
                    stack.push((c, next));
                }
                Some(_) => {}
                None => {
                    color[*id] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// An open plan as a chain: one action node per step, each continuing to the
/// next whatever is observed, then a halt node.
pub fn lift(plan: &JointOpenPlan, agent: Agent) -> ConditionalPlanDag {
    let actions = plan.actions(agent);
    let mut nodes: Vec<PlanNode> = actions
        .iter()
        .enumerate()
        .map(|(i, &action)| PlanNode::Act {
            action,
            branches: BTreeMap::new(),
            default: Some(NodeId(i + 1)),
        })
        .collect();
    nodes.push(PlanNode::Halt);
    ConditionalPlanDag {
        nodes,
        root: NodeId(0),
    }
}

/// A random plan graph over the agent's actions and states with
/// `num_nodes` nodes. Node 0 is a halt leaf; every other node branches only
/// to lower-numbered nodes, and the last node is the root.
pub fn random_cplan<R: Rng + ?Sized>(
    rng: &mut R,
    system: &SystemModel,
    agent: Agent,
    num_nodes: usize,
) -> ConditionalPlanDag {
    let num_nodes = num_nodes.max(1);
    let states = system.num_states(agent) as u32;
    let actions = system.num_actions(agent) as u32;
    let mut nodes = vec![PlanNode::Halt];
    for i in 1..num_nodes {
        let mut branches = BTreeMap::new();
        for s in 0..states {
            if rng.gen_bool(0.4) {
                branches.insert(StateId(s), NodeId(rng.gen_range(0..i)));
            }
        }
        let default =
            (branches.is_empty() || rng.gen_bool(0.5)).then(|| NodeId(rng.gen_range(0..i)));
        nodes.push(PlanNode::Act {
            action: ActionId(rng.gen_range(0..actions)),
            branches,
            default,
        });
    }
    ConditionalPlanDag::new(nodes, NodeId(num_nodes - 1)).expect("edges point to lower nodes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(action: u32, branches: &[(u32, usize)], default: Option<usize>) -> PlanNode {
        PlanNode::Act {
            action: ActionId(action),
            branches: branches
                .iter()
                .map(|&(s, n)| (StateId(s), NodeId(n)))
                .collect(),
            default: default.map(NodeId),
        }
    }

    #[test]
    fn cycle_rejected() {
        let nodes = vec![act(0, &[], Some(1)), act(0, &[], Some(0))];
        assert!(ConditionalPlanDag::new(nodes, NodeId(0)).is_err());
        let nodes = vec![act(0, &[], Some(5))];
        assert!(ConditionalPlanDag::new(nodes, NodeId(0)).is_err());
    }

    #[test]
    fn complete_tree_collapses() {
        // complete binary tree of depth d, children 2i+1, 2i+2
        let d = 6;
        let internal = (1 << d) - 1;
        let total = (1 << (d + 1)) - 1;
        let nodes: Vec<PlanNode> = (0..total)
            .map(|i| {
                if i < internal {
                    act(0, &[(0, 2 * i + 1), (1, 2 * i + 2)], None)
                } else {
                    PlanNode::Halt
                }
            })
            .collect();
        let dag = ConditionalPlanDag::new(nodes, NodeId(0)).unwrap();
        let canon = dag.canonicalize();
        assert_eq!(canon.len(), d + 1);
        assert_eq!(canon.depth(), d);
    }

    #[test]
    fn canonical_is_idempotent() {
        use rand::SeedableRng;
        let f = crate::fixtures::witness();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let dag = random_cplan(&mut rng, &f.system, Agent::Two, 12);
            let c = dag.canonicalize();
            assert_eq!(c.canonicalize(), c);
            assert!(c.len() <= dag.len());
        }
    }

    #[test]
    fn lift_chain() {
        let f = crate::fixtures::sys_d();
        let plan = crate::fixtures::plan_d(&f);
        let dag = lift(&plan, Agent::One);
        assert_eq!(dag.len(), plan.len() + 1);
        assert_eq!(dag.canonicalize(), dag);
    }
}
