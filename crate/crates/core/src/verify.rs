//! Feasibility checks and normalized quality.
//!
//! Maximization classes score `value / optimum`, minimization classes score
//! `optimum / value`. Infeasible outputs score 0 and are never optimal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CnfFormula, Instance, Payload, ProblemClass, PublicInstance, Solution};

/// Slack allowed on continuous packing constraints.
pub const LP_FEASIBILITY_TOL: f64 = 1e-9;
/// Relative tolerance for the optimal flag on continuous objectives.
pub const RELATIVE_OPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoredResult {
    pub feasible: bool,
    pub raw_objective: f64,
    pub quality: f64,
    pub optimal: bool,
}

impl ScoredResult {
    pub fn infeasible() -> Self {
        ScoredResult {
            feasible: false,
            raw_objective: 0.0,
            quality: 0.0,
            optimal: false,
        }
    }
}

fn shape_ok(class: ProblemClass, sol: &Solution) -> bool {
    matches!(
        (class, sol),
        (ProblemClass::Coloring, Solution::Coloring(_))
            | (ProblemClass::MaxSat, Solution::Assignment(_))
            | (ProblemClass::Mis | ProblemClass::Mds, Solution::VertexSet(_))
            | (ProblemClass::PackingLp, Solution::ItemFractions(_))
            | (ProblemClass::Mdkp, Solution::ItemPicks(_))
            | (ProblemClass::Tsp, Solution::Tour(_))
    )
}

fn distinct_in_range(set: &[usize], n: usize) -> Option<Vec<bool>> {
    let mut member = vec![false; n];
    for &v in set {
        if v >= n || std::mem::replace(&mut member[v], true) {
            return None;
        }
    }
    Some(member)
}

/// Feasibility check. Fails only when the solution variant does not match the
/// instance's class; malformed contents (wrong length, bad ids) are infeasible.
pub fn verify(inst: &PublicInstance, sol: &Solution) -> Result<bool> {
    if !shape_ok(inst.class, sol) {
        return Err(Error::ShapeMismatch(format!(
            "{} solution for {} instance",
            sol.kind(),
            inst.class
        )));
    }
    Ok(match (&inst.payload, sol) {
        (Payload::Graph(g), Solution::Coloring(colors)) => {
            colors.len() == g.n && g.edges.iter().all(|&(u, v)| colors[u] != colors[v])
        }
        (Payload::Cnf(f), Solution::Assignment(a)) => a.len() == f.num_vars,
        (Payload::Graph(g), Solution::VertexSet(set)) => match distinct_in_range(set, g.n) {
            None => false,
            Some(member) => match inst.class {
                ProblemClass::Mis => g.edges.iter().all(|&(u, v)| !(member[u] && member[v])),
                _ => {
                    let mut dominated = member.clone();
                    for &(u, v) in &g.edges {
                        dominated[u] |= member[v];
                        dominated[v] |= member[u];
                    }
                    dominated.into_iter().all(|d| d)
                }
            },
        },
        (Payload::Packing(p), Solution::ItemFractions(x)) => {
            x.len() == p.num_items()
                && x.iter().all(|&f| f.is_finite() && (0.0..=1.0).contains(&f))
                && p.load(|j| x[j])
                    .iter()
                    .zip(&p.capacities)
                    .all(|(&l, &c)| l <= c + LP_FEASIBILITY_TOL)
        }
        (Payload::Packing(p), Solution::ItemPicks(x)) => {
            x.len() == p.num_items()
                && p.load(|j| if x[j] { 1.0 } else { 0.0 })
                    .iter()
                    .zip(&p.capacities)
                    .all(|(&l, &c)| l <= c)
        }
        (Payload::Tsp(t), Solution::Tour(tour)) => {
            tour.len() == t.n && distinct_in_range(tour, t.n).is_some()
        }
        _ => unreachable!("shape checked above"),
    })
}

/// Objective value of a feasible solution in the class's native units.
pub fn raw_objective(inst: &PublicInstance, sol: &Solution) -> f64 {
    match (&inst.payload, sol) {
        (Payload::Graph(_), Solution::Coloring(colors)) => {
            let mut used: Vec<usize> = colors.clone();
            used.sort_unstable();
            used.dedup();
            used.len() as f64
        }
        (Payload::Cnf(f), Solution::Assignment(a)) => count_sat(f, a) as f64,
        (Payload::Graph(_), Solution::VertexSet(set)) => set.len() as f64,
        (Payload::Packing(p), Solution::ItemFractions(x)) => p.objective(|j| x[j]),
        (Payload::Packing(p), Solution::ItemPicks(x)) => {
            p.objective(|j| if x[j] { 1.0 } else { 0.0 })
        }
        (Payload::Tsp(t), Solution::Tour(tour)) => t.tour_length(tour),
        _ => f64::NAN,
    }
}

fn count_sat(f: &CnfFormula, a: &[bool]) -> usize {
    f.count_satisfied(a)
}

/// Scores `sol` against the instance's stored optimum.
pub fn quality(inst: &Instance, sol: &Solution) -> Result<ScoredResult> {
    let opt = inst.evaluator.optimum_value;
    if !(opt > 0.0) {
        return Err(Error::Evaluation(format!(
            "instance {} has non-positive optimum {opt}",
            inst.id()
        )));
    }
    if !verify(&inst.public, sol)? {
        return Ok(ScoredResult::infeasible());
    }
    let class = inst.class();
    let raw = raw_objective(&inst.public, sol);
    let continuous = class.has_continuous_objective();
    let mut q = if class.is_maximization() {
        raw / opt
    } else if raw > 0.0 {
        opt / raw
    } else {
        0.0
    };
    let optimal = if continuous {
        (raw - opt).abs() <= RELATIVE_OPT_TOL * opt.abs().max(1.0)
    } else {
        raw == opt
    };
    if optimal {
        q = 1.0;
    } else if q > 1.0 {
        return Err(Error::Evaluation(format!(
            "solution for {} has objective {raw}, better than stored optimum {opt}",
            inst.id()
        )));
    }
    Ok(ScoredResult {
        feasible: true,
        raw_objective: raw,
        quality: q,
        optimal,
    })
}

/// Fraction of results flagged optimal.
pub fn optimality_rate(results: &[ScoredResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::EmptyInput("optimality rate over no results"));
    }
    let hits = results.iter().filter(|r| r.optimal).count();
    Ok(hits as f64 / results.len() as f64)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::instance::{Certification, EvaluatorData, Graph, PackingInstance, TspInstance};

    fn inst(class: ProblemClass, payload: Payload, opt: f64) -> Instance {
        Instance {
            public: PublicInstance::new("t", class, payload).unwrap(),
            evaluator: EvaluatorData {
                family_id: "test".into(),
                hidden_rule_metadata: BTreeMap::new(),
                optimum_value: opt,
                optimum_solution: None,
                certification: Certification::Planted,
            },
        }
    }

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn monochromatic_edge_is_infeasible() {
        let i = inst(ProblemClass::Coloring, Payload::Graph(triangle()), 3.0);
        assert!(!verify(&i.public, &Solution::Coloring(vec![0, 0, 1])).unwrap());
        let s = quality(&i, &Solution::Coloring(vec![0, 0, 1])).unwrap();
        assert_eq!(s, ScoredResult::infeasible());
    }

    #[test]
    fn isolated_vertex_must_be_dominated() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        let i = inst(ProblemClass::Mds, Payload::Graph(g), 2.0);
        assert!(!verify(&i.public, &Solution::VertexSet(vec![])).unwrap());
        assert!(!verify(&i.public, &Solution::VertexSet(vec![0])).unwrap());
        assert!(verify(&i.public, &Solution::VertexSet(vec![0, 2])).unwrap());
    }

    #[test]
    fn zero_picks_always_fit() {
        let p = PackingInstance::new(vec![3.0, 4.0], vec![vec![5.0], vec![9.0]], vec![1.0]).unwrap();
        let i = inst(ProblemClass::Mdkp, Payload::Packing(p), 1.0);
        assert!(verify(&i.public, &Solution::ItemPicks(vec![false, false])).unwrap());
    }

    #[test]
    fn coloring_ratio() {
        // stored chi = 4, output uses 5 colors
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let i = inst(ProblemClass::Coloring, Payload::Graph(g), 4.0);
        let s = quality(&i, &Solution::Coloring(vec![0, 1, 2, 3, 4])).unwrap();
        assert!(s.feasible);
        assert_eq!(s.quality, 0.8);
        assert!(!s.optimal);
    }

    #[test]
    fn maxsat_at_optimum() {
        let f = CnfFormula::new(2, vec![vec![1], vec![-1, 2], vec![-2]]).unwrap();
        let i = inst(ProblemClass::MaxSat, Payload::Cnf(f), 2.0);
        let s = quality(&i, &Solution::Assignment(vec![true, true])).unwrap();
        assert_eq!((s.quality, s.optimal), (1.0, true));
    }

    #[test]
    fn shape_mismatch_is_error() {
        let i = inst(ProblemClass::Mis, Payload::Graph(triangle()), 1.0);
        assert!(matches!(
            verify(&i.public, &Solution::Tour(vec![0, 1, 2])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn non_positive_optimum_rejected() {
        let i = inst(ProblemClass::Mis, Payload::Graph(triangle()), 0.0);
        assert!(quality(&i, &Solution::VertexSet(vec![0])).is_err());
    }

    #[test]
    fn tour_must_be_permutation_and_closed() {
        let t = TspInstance::new(vec![(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]).unwrap();
        let i = inst(ProblemClass::Tsp, Payload::Tsp(t), 12.0);
        assert!(!verify(&i.public, &Solution::Tour(vec![0, 1, 1])).unwrap());
        let s = quality(&i, &Solution::Tour(vec![2, 0, 1])).unwrap();
        assert!(s.optimal);
        assert_eq!(s.raw_objective, 12.0);
    }

    #[test]
    fn lp_tolerance_flags_optimal() {
        let p = PackingInstance::new(vec![1.0], vec![vec![3.0]], vec![1.0]).unwrap();
        let i = inst(ProblemClass::PackingLp, Payload::Packing(p), 1.0 / 3.0);
        let s = quality(&i, &Solution::ItemFractions(vec![1.0 / 3.0 - 1e-13])).unwrap();
        assert!(s.optimal);
        assert_eq!(s.quality, 1.0);
    }

    #[test]
    fn optimality_rate_examples() {
        let opt = ScoredResult { feasible: true, raw_objective: 1.0, quality: 1.0, optimal: true };
        let sub = ScoredResult { optimal: false, quality: 0.5, ..opt };
        assert_eq!(optimality_rate(&[opt, opt, sub, sub]).unwrap(), 0.5);
        let bad = ScoredResult::infeasible();
        assert_eq!(optimality_rate(&[bad, bad]).unwrap(), 0.0);
        assert!(optimality_rate(&[]).is_err());
    }
}
