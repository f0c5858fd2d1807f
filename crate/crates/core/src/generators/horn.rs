//! Formulas with a planted strong Horn backdoor B.
//!
//! Each clause is Horn with probability 1 - rho. Otherwise it is
//! `x_i | x_j | !t_1 | ... | !t_s` with i in B, j outside B and the tail
//! drawn from outside B and j. Setting B leaves only Horn clauses, and inside
//! the non-Horn clauses backdoor variables show up positively more often than
//! the rest, which is what salience picks up.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{meta, Params, Planted};
use crate::error::{Error, Result};
use crate::instance::{lit_of, CnfFormula, Payload, ProblemClass, PublicInstance, Solution};
use crate::oracles::{maxsat::MAXSAT_VAR_LIMIT, solve_exact, OracleBudget};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HornParams {
    pub num_vars: usize,
    pub backdoor_size: usize,
    pub num_clauses: usize,
    pub rho: f64,
    pub horn_width: usize,
    pub tail_size: usize,
}

impl HornParams {
    pub fn validate(&self) -> Result<()> {
        let HornParams {
            num_vars: d,
            backdoor_size: k,
            rho,
            horn_width,
            tail_size,
            ..
        } = *self;
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if k == 0 || k >= d {
            return bad(format!("backdoor size {k} must lie in 1..{d}"));
        }
        if !(0.0..=1.0).contains(&rho) {
            return bad(format!("rho {rho} outside [0,1]"));
        }
        if horn_width == 0 || horn_width > d {
            return bad(format!("Horn width {horn_width} must lie in 1..={d}"));
        }
        if tail_size + k + 1 > d {
            return bad(format!("tail size {tail_size} exceeds d - k - 1 = {}", d - k - 1));
        }
        Ok(())
    }
}

/// Salience margin between backdoor and non-backdoor variables:
/// rho * (1/k - 1/(d-k)).
pub fn horn_backdoor_margin(d: usize, k: usize, rho: f64) -> f64 {
    rho * (1.0 / k as f64 - 1.0 / (d - k) as f64)
}

/// Draws one formula for the given backdoor (sorted, distinct variables).
pub fn generate_horn_backdoor_formula(p: &HornParams, backdoor: &[usize], rng: &mut Rng) -> Result<CnfFormula> {
    p.validate()?;
    let d = p.num_vars;
    if backdoor.len() != p.backdoor_size || backdoor.iter().any(|&v| v >= d) {
        return Err(Error::InvalidParameter(format!(
            "backdoor {backdoor:?} does not match size {} over {d} variables",
            p.backdoor_size
        )));
    }
    let mut in_b = vec![false; d];
    for &v in backdoor {
        in_b[v] = true;
    }
    let outside: Vec<usize> = (0..d).filter(|&v| !in_b[v]).collect();
    let mut clauses = Vec::with_capacity(p.num_clauses);
    for _ in 0..p.num_clauses {
        if rng.gen_bool(p.rho) {
            let i = backdoor[rng.gen_range(0..backdoor.len())];
            let jpos = rng.gen_range(0..outside.len());
            let j = outside[jpos];
            let mut clause = vec![lit_of(i, true), lit_of(j, true)];
            // Tail: uniform subset of outside \ {j}.
            for t in sample(rng, outside.len() - 1, p.tail_size) {
                let t = if t >= jpos { t + 1 } else { t };
                clause.push(lit_of(outside[t], false));
            }
            clauses.push(clause);
        } else {
            let vars = sample(rng, d, p.horn_width).into_vec();
            let positive = if rng.gen_bool(0.5) {
                Some(rng.gen_range(0..vars.len()))
            } else {
                None
            };
            clauses.push(
                vars.iter()
                    .enumerate()
                    .map(|(i, &v)| lit_of(v, Some(i) == positive))
                    .collect(),
            );
        }
    }
    CnfFormula::new(d, clauses)
}

/// Uniform k-subset of variables, sorted.
pub fn sample_backdoor(d: usize, k: usize, rng: &mut Rng) -> Vec<usize> {
    let mut b = sample(rng, d, k).into_vec();
    b.sort_unstable();
    b
}

pub(super) fn params_from(p: &Params) -> Result<HornParams> {
    Ok(HornParams {
        num_vars: p.u("vars")?,
        backdoor_size: p.u("backdoorSize")?,
        num_clauses: p.u("clauses")?,
        rho: p.prob("rho")?,
        horn_width: p.u("hornWidth")?,
        tail_size: p.u("tailSize")?,
    })
}

/// MaxSAT view of the planted distribution. The backdoor is fixed for the
/// family. The optimum is M whenever a satisfying assignment is found, which
/// the compiled backdoor solver decides completely; unsatisfiable draws fall
/// back to the exact MaxSAT oracle.
pub(super) fn horn_backdoor_family(p: &Params, fam: &mut Rng, rng: &mut Rng) -> Result<Planted> {
    let hp = params_from(p)?;
    hp.validate()?;
    let backdoor = sample_backdoor(hp.num_vars, hp.backdoor_size, fam);
    let f = generate_horn_backdoor_formula(&hp, &backdoor, rng)?;
    let m = f.num_clauses();
    let all_false = vec![false; hp.num_vars];
    let (value, assignment, how) = if f.is_satisfied_by(&all_false) {
        (m as f64, all_false, "all-false")
    } else if let Some(a) = crate::sat::solve_with_backdoor(&f, &backdoor)?.assignment().map(<[bool]>::to_vec) {
        (m as f64, a, "backdoor-solver")
    } else if hp.num_vars <= MAXSAT_VAR_LIMIT {
        let public = PublicInstance::new("horn-backdoor", ProblemClass::MaxSat, Payload::Cnf(f.clone()))?;
        let (v, s) = solve_exact(&public, OracleBudget::default())?;
        let Solution::Assignment(a) = s else {
            unreachable!("maxsat oracle returns assignments")
        };
        (v, a, "maxsat-oracle")
    } else {
        return Err(Error::InvalidParameter(
            "unsatisfiable Horn backdoor draw is too large to certify".into(),
        ));
    };
    Ok(Planted {
        payload: Payload::Cnf(f),
        optimum_value: value,
        optimum_solution: Solution::Assignment(assignment),
        metadata: meta(vec![
            ("backdoor", json!(backdoor)),
            ("hornParams", json!(hp)),
            ("optimumSource", json!(how)),
        ]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp() -> HornParams {
        HornParams {
            num_vars: 12,
            backdoor_size: 2,
            num_clauses: 300,
            rho: 0.5,
            horn_width: 3,
            tail_size: 2,
        }
    }

    #[test]
    fn non_horn_clauses_follow_the_template() {
        let mut r = crate::rng::from_seed(9);
        let b = vec![3, 7];
        let f = generate_horn_backdoor_formula(&hp(), &b, &mut r).unwrap();
        for c in &f.clauses {
            if CnfFormula::is_horn_clause(c) {
                assert_eq!(c.len(), 3);
                continue;
            }
            assert_eq!(c.len(), 4);
            assert!(b.contains(&crate::instance::var_of(c[0])) && c[0] > 0);
            assert!(!b.contains(&crate::instance::var_of(c[1])) && c[1] > 0);
            for &t in &c[2..] {
                assert!(t < 0 && !b.contains(&crate::instance::var_of(t)));
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        let mut bad = hp();
        bad.tail_size = 10;
        assert!(bad.validate().is_err());
        let mut bad = hp();
        bad.backdoor_size = 12;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn margin_matches_formula() {
        assert!((horn_backdoor_margin(12, 2, 0.5) - 0.2).abs() < 1e-15);
    }
}
