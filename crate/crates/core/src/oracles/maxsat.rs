use super::{Meter, OracleBudget};
use crate::error::{Error, Result};
use crate::heuristics::maxsat::greedy_flip;
use crate::instance::{var_of, CnfFormula};

pub const MAXSAT_VAR_LIMIT: usize = 24;

struct Search<'a> {
    f: &'a CnfFormula,
    /// Clause indices containing each variable.
    occurs: Vec<Vec<usize>>,
    /// Literals of each clause not yet falsified.
    open: Vec<usize>,
    satisfied_by: Vec<Option<usize>>,
    assignment: Vec<bool>,
    falsified: usize,
    best_falsified: usize,
    best: Vec<bool>,
    meter: Meter,
}

impl Search<'_> {
    fn set(&mut self, var: usize, value: bool) {
        self.assignment[var] = value;
        for &c in &self.occurs[var] {
            if self.satisfied_by[c].is_some() {
                continue;
            }
            let sat = self.f.clauses[c]
                .iter()
                .any(|&l| var_of(l) == var && (l > 0) == value);
            if sat {
                self.satisfied_by[c] = Some(var);
            } else {
                self.open[c] -= 1;
                if self.open[c] == 0 {
                    self.falsified += 1;
                }
            }
        }
    }

    fn unset(&mut self, var: usize) {
        for &c in &self.occurs[var] {
            if self.satisfied_by[c] == Some(var) {
                self.satisfied_by[c] = None;
            } else if self.satisfied_by[c].is_none() {
                if self.open[c] == 0 {
                    self.falsified -= 1;
                }
                self.open[c] += 1;
            }
        }
    }

    fn dfs(&mut self, var: usize) -> Result<()> {
        self.meter.tick()?;
        if self.falsified >= self.best_falsified {
            return Ok(());
        }
        if var == self.f.num_vars {
            self.best_falsified = self.falsified;
            self.best = self.assignment.clone();
            return Ok(());
        }
        for value in [true, false] {
            self.set(var, value);
            self.dfs(var + 1)?;
            self.unset(var);
            if self.best_falsified == 0 {
                break;
            }
        }
        Ok(())
    }
}

/// Exact MaxSAT (unweighted, duplicates counted) by branch and bound on the
/// number of falsified clauses, seeded with a local-search incumbent.
pub fn exact_maxsat(f: &CnfFormula, budget: OracleBudget) -> Result<(usize, Vec<bool>)> {
    let d = f.num_vars;
    if d > MAXSAT_VAR_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "exact MaxSAT supports at most {MAXSAT_VAR_LIMIT} variables, got {d}"
        )));
    }
    let incumbent = greedy_flip(f, 0, 4);
    let incumbent_sat = f.count_satisfied(&incumbent);
    let m = f.num_clauses();
    // Empty clauses can never be satisfied.
    let empty = f.clauses.iter().filter(|c| c.is_empty()).count();
    if incumbent_sat + empty == m {
        return Ok((incumbent_sat, incumbent));
    }
    let mut occurs = vec![Vec::new(); d];
    for (ci, clause) in f.clauses.iter().enumerate() {
        for &l in clause {
            let v = var_of(l);
            if occurs[v].last() != Some(&ci) {
                occurs[v].push(ci);
            }
        }
    }
    let mut search = Search {
        f,
        occurs,
        open: f.clauses.iter().map(Vec::len).collect(),
        satisfied_by: vec![None; m],
        assignment: vec![false; d],
        falsified: empty,
        best_falsified: m - incumbent_sat,
        best: incumbent,
        meter: Meter::new(budget),
    };
    search.dfs(0)?;
    Ok((m - search.best_falsified, search.best))
}

#[cfg(test)]
mod tests {
    use rand::seq::index::sample;
    use rand::Rng as _;

    use super::*;
    use crate::instance::lit_of;
    use crate::rng;

    fn random_formula(d: usize, m: usize, seed: u64) -> CnfFormula {
        let mut r = rng::from_seed(seed);
        let clauses = (0..m)
            .map(|_| {
                let w = r.gen_range(1..=3);
                sample(&mut r, d, w)
                    .into_iter()
                    .map(|v| lit_of(v, r.gen_bool(0.5)))
                    .collect()
            })
            .collect();
        CnfFormula::new(d, clauses).unwrap()
    }

    #[test]
    fn satisfiable_formula_reaches_all_clauses() {
        let f = CnfFormula::new(3, vec![vec![1, 2], vec![-1, 3], vec![-3, -2]]).unwrap();
        let (sat, a) = exact_maxsat(&f, OracleBudget::default()).unwrap();
        assert_eq!(sat, 3);
        assert!(f.is_satisfied_by(&a));
    }

    #[test]
    fn matches_enumeration() {
        for seed in 0..50 {
            let f = random_formula(10, 60, seed);
            let best = (0u32..1 << 10)
                .map(|mask| {
                    let a: Vec<bool> = (0..10).map(|v| mask >> v & 1 == 1).collect();
                    f.count_satisfied(&a)
                })
                .max()
                .unwrap();
            let (sat, a) = exact_maxsat(&f, OracleBudget::default()).unwrap();
            assert_eq!(sat, best, "seed {seed}");
            assert_eq!(f.count_satisfied(&a), sat);
        }
    }
}
