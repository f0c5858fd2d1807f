use crate::error::{Error, Result};
use crate::instance::{var_of, CnfFormula};

use super::SatResult;

/// Linear-time Horn-SAT. Each clause is read as `negatives -> positive`;
/// starting from all-false, a clause fires once all its negated variables
/// are true. The result is the minimal model, or UNSAT when a clause without
/// a positive literal fires.
pub fn horn_sat(f: &CnfFormula) -> Result<SatResult> {
    horn_sat_clauses(f.num_vars, &f.clauses)
}

pub(crate) fn horn_sat_clauses(num_vars: usize, clauses: &[Vec<i32>]) -> Result<SatResult> {
    let mut head: Vec<Option<usize>> = Vec::with_capacity(clauses.len());
    let mut missing: Vec<usize> = Vec::with_capacity(clauses.len());
    // watchers[v] = clauses with literal !v
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); num_vars];
    let mut queue = Vec::new();
    for (ci, c) in clauses.iter().enumerate() {
        let mut pos = None;
        let mut negs = 0;
        for &lit in c {
            if lit > 0 {
                if pos.is_some() {
                    return Err(Error::NotHorn(ci));
                }
                pos = Some(var_of(lit));
            } else {
                negs += 1;
                watchers[var_of(lit)].push(ci);
            }
        }
        head.push(pos);
        missing.push(negs);
        if negs == 0 {
            queue.push(ci);
        }
    }
    let mut value = vec![false; num_vars];
    while let Some(ci) = queue.pop() {
        let Some(v) = head[ci] else {
            return Ok(SatResult::Unsat);
        };
        if value[v] {
            continue;
        }
        value[v] = true;
        for &cj in &watchers[v] {
            missing[cj] -= 1;
            if missing[cj] == 0 {
                queue.push(cj);
            }
        }
    }
    Ok(SatResult::Sat(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_chain() {
        let f = CnfFormula::new(2, vec![vec![1], vec![-1, 2]]).unwrap();
        assert_eq!(horn_sat(&f).unwrap(), SatResult::Sat(vec![true, true]));
    }

    #[test]
    fn direct_conflict() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(horn_sat(&f).unwrap(), SatResult::Unsat);
    }

    #[test]
    fn rejects_non_horn() {
        let f = CnfFormula::new(2, vec![vec![-1], vec![1, 2]]).unwrap();
        assert!(matches!(horn_sat(&f), Err(Error::NotHorn(1))));
    }

    #[test]
    fn empty_clause_is_unsat() {
        let f = CnfFormula::new(1, vec![vec![]]).unwrap();
        assert_eq!(horn_sat(&f).unwrap(), SatResult::Unsat);
    }
}
