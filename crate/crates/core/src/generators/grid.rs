use super::Instance;
use crate::error::{Error, Result};
use crate::model::{ActionId, Agent, Config, EnvId, GoalPattern, GoalSet, StateId, SystemModel};

pub type Cell = (usize, usize);

const MOVES: [(&str, isize, isize); 5] = [
    ("up", -1, 0),
    ("down", 1, 0),
    ("left", 0, -1),
    ("right", 0, 1),
    ("stay", 0, 0),
];

/// Two agents on a `rows x cols` grid. Each agent's state is its cell,
/// named `x<row>y<col>`. Moves are clipped at the border. A move into the
/// cell the other agent occupies or is moving into is blocked and the agent
/// stays put; this is the only way the agents affect each other.
///
/// The goal is both agents on their target cells, with any environment.
pub fn gen_grid(
    rows: usize,
    cols: usize,
    start1: Cell,
    start2: Cell,
    goal1: Cell,
    goal2: Cell,
) -> Result<Instance> {
    if rows == 0 || cols == 0 {
        return Err(Error::OutOfRange {
            what: "grid size",
            detail: format!("{rows}x{cols}"),
        });
    }
    for (what, (r, c)) in [
        ("agent 1 start", start1),
        ("agent 2 start", start2),
        ("agent 1 goal", goal1),
        ("agent 2 goal", goal2),
    ] {
        if r >= rows || c >= cols {
            return Err(Error::OutOfRange {
                what,
                detail: format!("({r},{c}) outside {rows}x{cols} grid"),
            });
        }
    }
    let cells: Vec<String> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| format!("x{r}y{c}")))
        .collect();
    let actions: Vec<String> = MOVES.iter().map(|m| m.0.to_string()).collect();
    let mut system = SystemModel::new(
        cells.clone(),
        cells,
        vec!["e".into()],
        actions.clone(),
        actions,
    )?;
    let id = |(r, c): Cell| StateId((r * cols + c) as u32);
    let cell = |s: StateId| (s.0 as usize / cols, s.0 as usize % cols);
    let all: Vec<ActionId> = (0..MOVES.len() as u32).map(ActionId).collect();
    for agent in Agent::BOTH {
        for s in 0..rows * cols {
            system.set_available(agent, StateId(s as u32), &all);
        }
    }
    let target = |s: StateId, a: ActionId| {
        let (r, c) = cell(s);
        let (_, dr, dc) = MOVES[a.0 as usize];
        let nr = (r as isize + dr).clamp(0, rows as isize - 1) as usize;
        let nc = (c as isize + dc).clamp(0, cols as isize - 1) as usize;
        id((nr, nc))
    };
    let e = EnvId(0);
    for c in system.configs().collect::<Vec<_>>() {
        for &a1 in &all {
            for &a2 in &all {
                let (t1, t2) = (target(c.s1, a1), target(c.s2, a2));
                let blocked1 = t1 != c.s1 && (t1 == c.s2 || t1 == t2);
                let blocked2 = t2 != c.s2 && (t2 == c.s1 || t2 == t1);
                let s1 = if blocked1 { c.s1 } else { t1 };
                let s2 = if blocked2 { c.s2 } else { t2 };
                system.insert_transition(c, a1, a2, Config::new(s1, s2, e));
            }
        }
    }
    let goal = GoalSet::new(vec![GoalPattern {
        s1: Some(id(goal1)),
        s2: Some(id(goal2)),
        b: None,
    }]);
    Ok(Instance {
        system,
        c0: Config::new(id(start1), id(start2), e),
        goal,
    })
}
