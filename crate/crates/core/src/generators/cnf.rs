use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};

/// Truth values keyed by variable index `1..=n`.
pub type Assignment = BTreeMap<usize, bool>;

/// A 3-CNF formula. Literals are signed variable indices (`-3` is `¬x3`).
/// Every clause has exactly three literals; shorter clauses are written with
/// repeated literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidCnf("formula has no clauses".into()));
        }
        for clause in &clauses {
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if var == 0 || var > num_vars {
                    return Err(Error::InvalidCnf(format!(
                        "literal {lit} outside variables 1..={num_vars}"
                    )));
                }
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    /// Build from clauses of one to three literals, padding short clauses by
    /// repeating their last literal.
    pub fn padded(num_vars: usize, clauses: &[Vec<i32>]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (i, c) in clauses.iter().enumerate() {
            let clause = match c[..] {
                [a] => [a, a, a],
                [a, b] => [a, b, b],
                [a, b, c] => [a, b, c],
                [] => return Err(Error::InvalidCnf(format!("clause {} is empty", i + 1))),
                _ => {
                    return Err(Error::InvalidCnf(format!(
                        "clause {} has {} literals; only 3-CNF is supported",
                        i + 1,
                        c.len()
                    )))
                }
            };
            out.push(clause);
        }
        Cnf::new(num_vars, out)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// `None` if the assignment misses a variable used by the formula.
    pub fn eval(&self, assignment: &Assignment) -> Option<bool> {
        let mut all = true;
        for clause in &self.clauses {
            let mut sat = false;
            for &lit in clause {
                let v = *assignment.get(&(lit.unsigned_abs() as usize))?;
                sat |= v == (lit > 0);
            }
            all &= sat;
        }
        Some(all)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            let _ = writeln!(out, "{} {} {} 0", c[0], c[1], c[2]);
        }
        out
    }
}

/// DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header, then
/// literals with each clause terminated by `0`.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts[..] {
                ["p", "cnf", n, m] => n.parse().ok().zip(m.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected `p cnf <vars> <clauses>`".into(),
            })?);
            continue;
        }
        if header.is_none() {
            return Err(Error::Parse {
                line: i + 1,
                message: "clause before `p cnf` header".into(),
            });
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("bad literal `{tok}`"),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let (n, m) = header.ok_or_else(|| Error::InvalidCnf("missing `p cnf` header".into()))?;
    if clauses.len() != m {
        return Err(Error::InvalidCnf(format!(
            "header declares {m} clauses, found {}",
            clauses.len()
        )));
    }
    Cnf::padded(n, &clauses)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Satisfiable(Assignment),
    Unsatisfiable,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Satisfiable(_))
    }
}

pub const SAT_BRUTE_MAX_VARS: usize = 24;

/// Tries all `2^n` assignments. Assignment number `i` sets `x_v` to bit
/// `v - 1` of `i`, so the all-false assignment comes first.
pub fn sat_brute(cnf: &Cnf) -> Result<SatResult> {
    let n = cnf.num_vars();
    if n > SAT_BRUTE_MAX_VARS {
        return Err(Error::TooManyVars {
            n,
            max: SAT_BRUTE_MAX_VARS,
        });
    }
    for bits in 0u32..(1u32 << n) {
        let satisfied = cnf.clauses().iter().all(|clause| {
            clause.iter().any(|&lit| {
                let v = lit.unsigned_abs() - 1;
                ((bits >> v) & 1 == 1) == (lit > 0)
            })
        });
        if satisfied {
            let assignment = (1..=n).map(|v| (v, (bits >> (v - 1)) & 1 == 1)).collect();
            return Ok(SatResult::Satisfiable(assignment));
        }
    }
    Ok(SatResult::Unsatisfiable)
}

/// Uniform random 3-CNF: each literal picks a variable and a sign uniformly.
pub fn random_cnf<R: Rng + ?Sized>(rng: &mut R, num_vars: usize, num_clauses: usize) -> Cnf {
    let clauses = (0..num_clauses)
        .map(|_| {
            std::array::from_fn(|_| {
                let v = rng.gen_range(1..=num_vars) as i32;
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
        })
        .collect();
    Cnf::new(num_vars, clauses).expect("generated literals are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn contradiction_is_unsat() {
        let cnf = Cnf::padded(1, &[vec![1], vec![-1]]).unwrap();
        assert_eq!(sat_brute(&cnf).unwrap(), SatResult::Unsatisfiable);
    }

    #[test]
    fn first_assignment_in_order() {
        let cnf = Cnf::new(3, vec![[1, 2, 3]]).unwrap();
        let SatResult::Satisfiable(a) = sat_brute(&cnf).unwrap() else {
            panic!()
        };
        assert_eq!(a, Assignment::from([(1, true), (2, false), (3, false)]));
    }

    #[test]
    fn random_formulas_checked_by_truth_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let cnf = random_cnf(&mut rng, 6, 12);
            match sat_brute(&cnf).unwrap() {
                SatResult::Satisfiable(a) => assert_eq!(cnf.eval(&a), Some(true)),
                SatResult::Unsatisfiable => {
                    for bits in 0..64u32 {
                        let a: Assignment =
                            (1..=6).map(|v| (v, (bits >> (v - 1)) & 1 == 1)).collect();
                        assert_eq!(cnf.eval(&a), Some(false));
                    }
                }
            }
        }
    }

    #[test]
    fn too_many_vars() {
        let cnf = Cnf::new(25, vec![[1, 2, 25]]).unwrap();
        assert!(matches!(sat_brute(&cnf), Err(Error::TooManyVars { .. })));
    }

    #[test]
    fn dimacs_pads_short_clauses() {
        let cnf = parse_dimacs("c demo\np cnf 2 2\n1 0\n-1 2 0\n").unwrap();
        assert_eq!(cnf.clauses(), &[[1, 1, 1], [-1, 2, 2]]);
        assert_eq!(parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    }

    #[test]
    fn dimacs_errors() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2 -1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n3 0\n").is_err());
    }
}
