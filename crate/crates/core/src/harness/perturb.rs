//! Post-hoc relabeling ablation for graph targets.

use serde::{Deserialize, Serialize};

use super::{geometric_mean, mean, QUALITY_CHANGE_TOL, RUNTIME_FLOOR_MS};
use crate::error::{Error, Result};
use crate::heuristics::{run_measured, MeasuredSolver, RunConfig};
use crate::instance::{relabel_graph, Instance, ProblemClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PerturbationReport {
    pub target: String,
    pub class: ProblemClass,
    pub solver_id: String,
    pub instances: usize,
    pub q_orig: f64,
    pub q_pert: f64,
    pub delta_q: f64,
    pub quality_changed: f64,
    pub optimality_changed: f64,
    pub feasibility_changed: f64,
    /// Mean perturbed runtime over mean original runtime.
    pub runtime_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PerturbationSummary {
    pub scope: String,
    pub targets: usize,
    pub q_orig: f64,
    pub q_pert: f64,
    pub delta_q: f64,
    pub quality_changed: f64,
    pub optimality_changed: f64,
    pub feasibility_changed: f64,
    /// Geometric mean of per-target runtime ratios.
    pub runtime_ratio: f64,
}

/// Runs `solver` on each test instance and on a seeded relabeled copy.
pub fn run_perturbation_ablation(
    target: &str,
    test: &[Instance],
    solver: &dyn MeasuredSolver,
    seed: u64,
    run_cfg: &RunConfig,
) -> Result<PerturbationReport> {
    let class = test.first().map(Instance::class).ok_or(Error::EmptyInput("test split"))?;
    if !class.is_graph() {
        return Err(Error::UnsupportedClass(class));
    }
    let mut pairs = Vec::with_capacity(test.len());
    for inst in test {
        let (pert, _) = relabel_graph(inst, seed)?;
        let a = run_measured(solver, inst, run_cfg)?;
        let b = run_measured(solver, &pert, run_cfg)?;
        pairs.push((a, b));
    }
    let frac = |f: &dyn Fn(&(crate::heuristics::RunMeasurement, crate::heuristics::RunMeasurement)) -> bool| {
        pairs.iter().filter(|p| f(p)).count() as f64 / pairs.len() as f64
    };
    let q_orig = mean(pairs.iter().map(|p| p.0.scored.quality));
    let q_pert = mean(pairs.iter().map(|p| p.1.scored.quality));
    let t_orig = mean(pairs.iter().map(|p| p.0.wall_clock_ms));
    let t_pert = mean(pairs.iter().map(|p| p.1.wall_clock_ms));
    Ok(PerturbationReport {
        target: target.to_string(),
        class,
        solver_id: solver.id().to_string(),
        instances: pairs.len(),
        q_orig,
        q_pert,
        delta_q: q_pert - q_orig,
        quality_changed: frac(&|(a, b)| (a.scored.quality - b.scored.quality).abs() > QUALITY_CHANGE_TOL),
        optimality_changed: frac(&|(a, b)| a.scored.optimal != b.scored.optimal),
        feasibility_changed: frac(&|(a, b)| a.scored.feasible != b.scored.feasible),
        runtime_ratio: t_pert.max(RUNTIME_FLOOR_MS) / t_orig.max(RUNTIME_FLOOR_MS),
    })
}

fn summarize(scope: String, rs: &[&PerturbationReport]) -> PerturbationSummary {
    PerturbationSummary {
        scope,
        targets: rs.len(),
        q_orig: mean(rs.iter().map(|r| r.q_orig)),
        q_pert: mean(rs.iter().map(|r| r.q_pert)),
        delta_q: mean(rs.iter().map(|r| r.delta_q)),
        quality_changed: mean(rs.iter().map(|r| r.quality_changed)),
        optimality_changed: mean(rs.iter().map(|r| r.optimality_changed)),
        feasibility_changed: mean(rs.iter().map(|r| r.feasibility_changed)),
        runtime_ratio: geometric_mean(&rs.iter().map(|r| r.runtime_ratio).collect::<Vec<_>>()),
    }
}

/// Per-class rows then an overall row, each averaging target reports.
pub fn aggregate_perturbations(reports: &[PerturbationReport]) -> Result<Vec<PerturbationSummary>> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("perturbation reports"));
    }
    let mut out = Vec::new();
    for class in ProblemClass::ALL {
        let rs: Vec<&PerturbationReport> = reports.iter().filter(|r| r.class == class).collect();
        if !rs.is_empty() {
            out.push(summarize(class.to_string(), &rs));
        }
    }
    out.push(summarize("all".into(), &reports.iter().collect::<Vec<_>>()));
    Ok(out)
}
