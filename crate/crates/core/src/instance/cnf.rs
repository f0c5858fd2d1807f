use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CNF formula with DIMACS-style signed, 1-indexed literals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawCnf")]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawCnf {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl TryFrom<RawCnf> for CnfFormula {
    type Error = Error;

    fn try_from(raw: RawCnf) -> Result<Self> {
        CnfFormula::new(raw.num_vars, raw.clauses)
    }
}

/// 0-indexed variable of a literal.
#[inline]
pub fn var_of(lit: i32) -> usize {
    lit.unsigned_abs() as usize - 1
}

/// Literal for 0-indexed variable `var` with the given polarity.
#[inline]
pub fn lit_of(var: usize, positive: bool) -> i32 {
    let l = var as i32 + 1;
    if positive {
        l
    } else {
        -l
    }
}

impl CnfFormula {
    /// Validates literal ranges and rejects tautological clauses.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || var_of(lit) >= num_vars {
                    return Err(Error::InvalidParameter(format!(
                        "clause {ci}: literal {lit} out of range for {num_vars} variables"
                    )));
                }
                if clause.contains(&-lit) {
                    return Err(Error::InvalidParameter(format!(
                        "clause {ci} contains both {lit} and {}",
                        -lit
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Total literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    pub fn is_horn_clause(clause: &[i32]) -> bool {
        clause.iter().filter(|&&l| l > 0).count() <= 1
    }

    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(|c| Self::is_horn_clause(c))
    }

    pub fn clause_satisfied(clause: &[i32], assignment: &[bool]) -> bool {
        clause.iter().any(|&l| assignment[var_of(l)] == (l > 0))
    }

    /// Number of satisfied clause occurrences (duplicates counted separately).
    pub fn count_satisfied(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| Self::clause_satisfied(c, assignment))
            .count()
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars && self.count_satisfied(assignment) == self.clauses.len()
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS cnf. Comment lines and `%` terminators are ignored;
    /// clauses may span lines.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::Parse(format!("bad DIMACS header `{line}`")));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad DIMACS header `{line}`")))
                };
                header = Some((parse(parts[1])?, parse(parts[2])?));
                continue;
            }
            if header.is_none() {
                return Err(Error::Parse("clause before `p cnf` header".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad literal `{tok}`")))?;
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
        let (num_vars, num_clauses) =
            header.ok_or_else(|| Error::Parse("missing `p cnf` header".into()))?;
        if clauses.len() != num_clauses {
            return Err(Error::Parse(format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            )));
        }
        CnfFormula::new(num_vars, clauses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let f = CnfFormula::new(3, vec![vec![1, -2], vec![3], vec![-1, 2, -3]]).unwrap();
        let text = f.to_dimacs();
        assert_eq!(CnfFormula::from_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn dimacs_comments_and_multiline() {
        let text = "c hello\np cnf 2 2\n1 -2\n 0 2 0\n";
        let f = CnfFormula::from_dimacs(text).unwrap();
        assert_eq!(f.clauses, vec![vec![1, -2], vec![2]]);
    }

    #[test]
    fn rejects_tautology_and_range() {
        assert!(CnfFormula::new(2, vec![vec![1, -1]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![3]]).is_err());
        assert!(CnfFormula::from_dimacs("p cnf 2 2\n1 0\n").is_err());
    }

    #[test]
    fn counts_duplicates() {
        let f = CnfFormula::new(1, vec![vec![1], vec![1], vec![-1]]).unwrap();
        assert_eq!(f.count_satisfied(&[true]), 2);
        assert_eq!(f.count_satisfied(&[false]), 1);
    }
}
