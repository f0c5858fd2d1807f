use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::DiagnosticTrace;
use crate::instance::{var_of, CnfFormula};

use super::dpll::dpll_clauses;
use super::horn::horn_sat_clauses;
use super::{dpll, SatResult};

/// Largest backdoor the compiled solver will enumerate (2^20 branches).
pub const MAX_BACKDOOR_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompiledBackdoorSolver {
    pub backdoor: Vec<usize>,
    pub base_solver: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackdoorRun {
    pub result: SatResult,
    pub trace: DiagnosticTrace,
}

impl BackdoorRun {
    pub fn assignment(&self) -> Option<&[bool]> {
        match &self.result {
            SatResult::Sat(a) => Some(a),
            SatResult::Unsat => None,
        }
    }
}

impl CompiledBackdoorSolver {
    /// Validates `backdoor` as distinct variables of a `d`-variable formula.
    pub fn new(d: usize, backdoor: &[usize]) -> Result<Self> {
        let mut b = backdoor.to_vec();
        b.sort_unstable();
        if b.windows(2).any(|w| w[0] == w[1]) || b.iter().any(|&v| v >= d) {
            return Err(Error::InvalidParameter(format!(
                "backdoor {backdoor:?} must be distinct variables below {d}"
            )));
        }
        if b.len() > MAX_BACKDOOR_BITS {
            return Err(Error::BudgetExceeded {
                states: 1u64 << b.len().min(63),
                seconds: 0.0,
            });
        }
        Ok(CompiledBackdoorSolver {
            backdoor: b,
            base_solver: "dpll".into(),
        })
    }

    /// Enumerates assignments to the backdoor in lexicographic order (first
    /// backdoor variable most significant, false before true). Horn residuals
    /// go to Horn-SAT, the rest to DPLL. The verdict always equals DPLL's.
    pub fn solve(&self, f: &CnfFormula) -> Result<BackdoorRun> {
        if self.backdoor.iter().any(|&v| v >= f.num_vars) {
            return Err(Error::ShapeMismatch(format!(
                "backdoor {:?} exceeds {} variables",
                self.backdoor, f.num_vars
            )));
        }
        let k = self.backdoor.len();
        let mut trace = DiagnosticTrace::default();
        let mut fixed: Vec<Option<bool>> = vec![None; f.num_vars];
        let mut branches = 0u64;
        let mut residual_total = 0usize;
        for mask in 0..1u64 << k {
            for (pos, &v) in self.backdoor.iter().enumerate() {
                fixed[v] = Some(mask >> (k - 1 - pos) & 1 == 1);
            }
            branches += 1;
            let Some(residual) = restrict(&f.clauses, &fixed) else {
                continue;
            };
            residual_total += residual.len();
            let outcome = if residual.iter().all(|c| CnfFormula::is_horn_clause(c)) {
                trace.shortcut_used = true;
                horn_sat_clauses(f.num_vars, &residual)?
            } else {
                trace.fallback_used = true;
                dpll_clauses(f.num_vars, residual)
            };
            if let SatResult::Sat(mut a) = outcome {
                for &v in &self.backdoor {
                    a[v] = fixed[v].unwrap();
                }
                debug_assert!(f.is_satisfied_by(&a));
                trace.residual_size = residual_total as f64 / branches as f64;
                trace.repair_iterations = branches;
                return Ok(BackdoorRun {
                    result: SatResult::Sat(a),
                    trace,
                });
            }
        }
        trace.residual_size = residual_total as f64 / branches as f64;
        trace.repair_iterations = branches;
        Ok(BackdoorRun {
            result: SatResult::Unsat,
            trace,
        })
    }
}

/// Restriction under a partial assignment: true literals delete their
/// clause, false literals are removed, and an emptied clause is a conflict.
pub fn restrict(clauses: &[Vec<i32>], fixed: &[Option<bool>]) -> Option<Vec<Vec<i32>>> {
    let mut out = Vec::with_capacity(clauses.len());
    'clause: for c in clauses {
        let mut kept = Vec::with_capacity(c.len());
        for &lit in c {
            match fixed[var_of(lit)] {
                Some(b) if b == (lit > 0) => continue 'clause,
                Some(_) => {}
                None => kept.push(lit),
            }
        }
        if kept.is_empty() {
            return None;
        }
        out.push(kept);
    }
    Some(out)
}

/// Convenience wrapper around [`CompiledBackdoorSolver`].
pub fn solve_with_backdoor(f: &CnfFormula, backdoor: &[usize]) -> Result<BackdoorRun> {
    CompiledBackdoorSolver::new(f.num_vars, backdoor)?.solve(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpeedupReport {
    pub formulas: usize,
    pub repeats: usize,
    pub mean_backdoor_ms: f64,
    pub mean_dpll_ms: f64,
    /// mean_dpll_ms / mean_backdoor_ms
    pub speedup: f64,
    pub verdicts_agree: bool,
    pub fallback_rate: f64,
}

/// Times the compiled solver against plain DPLL on the same formulas.
/// Each formula is solved `repeats` times by each; means are per solve.
pub fn measure_speedup(formulas: &[CnfFormula], backdoor: &[usize], repeats: usize) -> Result<SpeedupReport> {
    if formulas.is_empty() {
        return Err(Error::EmptyInput("speedup formulas"));
    }
    let repeats = repeats.max(1);
    let solver = CompiledBackdoorSolver::new(formulas[0].num_vars, backdoor)?;
    let mut t_b = 0.0;
    let mut t_d = 0.0;
    let mut agree = true;
    let mut fallbacks = 0usize;
    for f in formulas {
        for _ in 0..repeats {
            let s = Instant::now();
            let run = solver.solve(f)?;
            t_b += s.elapsed().as_secs_f64() * 1e3;
            let s = Instant::now();
            let base = dpll(f);
            t_d += s.elapsed().as_secs_f64() * 1e3;
            agree &= run.result.is_sat() == base.is_sat();
            fallbacks += usize::from(run.trace.fallback_used);
        }
    }
    let runs = (formulas.len() * repeats) as f64;
    let (mb, md) = (t_b / runs, t_d / runs);
    Ok(SpeedupReport {
        formulas: formulas.len(),
        repeats,
        mean_backdoor_ms: mb,
        mean_dpll_ms: md,
        speedup: md / mb.max(1e-9),
        verdicts_agree: agree,
        fallback_rate: fallbacks as f64 / runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_horn_backdoor_formula, HornParams};

    #[test]
    fn true_backdoor_never_falls_back() {
        let p = HornParams {
            num_vars: 14,
            backdoor_size: 2,
            num_clauses: 60,
            rho: 0.5,
            horn_width: 3,
            tail_size: 1,
        };
        let mut r = crate::rng::from_seed(4);
        for _ in 0..50 {
            let f = generate_horn_backdoor_formula(&p, &[2, 9], &mut r).unwrap();
            let run = solve_with_backdoor(&f, &[2, 9]).unwrap();
            assert!(run.trace.shortcut_used || run.result == SatResult::Unsat);
            assert!(!run.trace.fallback_used);
            assert_eq!(run.result.is_sat(), dpll(&f).is_sat());
        }
    }

    #[test]
    fn wrong_backdoor_falls_back() {
        // Non-Horn clause over variables outside the guess survives restriction.
        let f = CnfFormula::new(4, vec![vec![1, 2, -3], vec![-1, -2]]).unwrap();
        let run = solve_with_backdoor(&f, &[3]).unwrap();
        assert!(run.trace.fallback_used);
        assert!(run.result.is_sat());
    }

    #[test]
    fn conflicting_branches_are_skipped() {
        let f = CnfFormula::new(2, vec![vec![1], vec![-1, 2]]).unwrap();
        let run = solve_with_backdoor(&f, &[0]).unwrap();
        assert_eq!(run.result, SatResult::Sat(vec![true, true]));
        assert_eq!(run.trace.repair_iterations, 2);
        let u = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(solve_with_backdoor(&u, &[0]).unwrap().result, SatResult::Unsat);
    }

    #[test]
    fn oversized_backdoor_rejected() {
        let b: Vec<usize> = (0..21).collect();
        assert!(matches!(
            CompiledBackdoorSolver::new(30, &b),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
