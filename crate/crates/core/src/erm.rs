//! Runtime-aware selection over a fixed solver library: the empirically
//! fastest solver that is feasible on every sample instance, with the
//! prior-weighted generalization bounds that go with it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::{run_measured, Clock, RunConfig, SolverRef, DEFAULT_CLIP_MS};
use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ErmConfig {
    pub delta: f64,
    pub t_max_ms: f64,
    /// Prior mass per solver id; missing ids have mass 0.
    pub prior: BTreeMap<String, f64>,
    pub failure_runtime_ms: f64,
    pub dataset_seed: u64,
    /// Evaluate (solver, instance) pairs on the rayon pool.
    pub parallel: bool,
}

impl ErmConfig {
    /// Prior proportional to each solver's declared weight.
    pub fn for_library(library: &[SolverRef], delta: f64) -> Self {
        let total: f64 = library.iter().map(|s| s.prior_weight()).sum();
        let prior = library
            .iter()
            .map(|s| (s.id().to_string(), s.prior_weight() / total))
            .collect();
        ErmConfig {
            delta,
            t_max_ms: DEFAULT_CLIP_MS,
            prior,
            failure_runtime_ms: DEFAULT_CLIP_MS,
            dataset_seed: 0,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {} must lie in (0,1)", self.delta)));
        }
        if !(self.t_max_ms > 0.0) {
            return Err(Error::InvalidParameter(format!("tMaxMs {} must be positive", self.t_max_ms)));
        }
        if self.prior.values().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("prior masses must be finite and nonnegative".into()));
        }
        let mass: f64 = self.prior.values().sum();
        if mass > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("prior mass {mass} exceeds 1")));
        }
        Ok(())
    }

    /// Gamma(c) = ln(1/pi(c)); infinite when pi(c) = 0.
    pub fn complexity(&self, solver_id: &str) -> f64 {
        match self.prior.get(solver_id) {
            Some(&p) if p > 0.0 => -p.ln(),
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverStats {
    pub solver_id: String,
    pub empirical_err: f64,
    pub empirical_run_ms: f64,
    pub crashes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ErmSelection {
    /// None when no solver is sample-consistent.
    pub chosen_id: Option<String>,
    pub no_feasible_solver: bool,
    pub n: usize,
    /// One entry per library solver, in library order.
    pub stats: Vec<SolverStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err_bound: Option<f64>,
    /// Runtime gap bound against each zero-error comparator with positive prior.
    pub run_bound_gap_ms: BTreeMap<String, f64>,
}

impl ErmSelection {
    pub fn stats_for(&self, id: &str) -> Option<&SolverStats> {
        self.stats.iter().find(|s| s.solver_id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem1Bounds {
    pub err_bound: f64,
    pub run_gap_ms: BTreeMap<String, f64>,
}

/// Runs every solver on every sample instance and selects.
pub fn select_erm(library: &[SolverRef], sample: &[Instance], cfg: &ErmConfig) -> Result<ErmSelection> {
    if library.is_empty() {
        return Err(Error::EmptyInput("solver library"));
    }
    if sample.is_empty() {
        return Err(Error::EmptyInput("selection sample"));
    }
    cfg.validate()?;
    let run_cfg = RunConfig {
        dataset_seed: cfg.dataset_seed,
        failure_runtime_ms: cfg.failure_runtime_ms,
        clock: Clock::Wall,
    };
    let pairs: Vec<(usize, usize)> = (0..library.len())
        .flat_map(|s| (0..sample.len()).map(move |i| (s, i)))
        .collect();
    let run = |&(s, i): &(usize, usize)| run_measured(library[s].as_ref(), &sample[i], &run_cfg);
    let runs = if cfg.parallel {
        pairs.par_iter().map(run).collect::<Result<Vec<_>>>()?
    } else {
        pairs.iter().map(run).collect::<Result<Vec<_>>>()?
    };
    let n = sample.len();
    let stats: Vec<SolverStats> = library
        .iter()
        .enumerate()
        .map(|(s, solver)| {
            let mine = &runs[s * n..(s + 1) * n];
            let errors = mine.iter().filter(|r| !r.scored.feasible).count();
            SolverStats {
                solver_id: solver.id().to_string(),
                empirical_err: errors as f64 / n as f64,
                empirical_run_ms: mine.iter().map(|r| r.wall_clock_ms).sum::<f64>() / n as f64,
                crashes: mine.iter().filter(|r| r.crashed).count(),
            }
        })
        .collect();
    let chosen = choose(&stats);
    let mut sel = ErmSelection {
        no_feasible_solver: chosen.is_none(),
        chosen_id: chosen,
        n,
        stats,
        err_bound: None,
        run_bound_gap_ms: BTreeMap::new(),
    };
    if sel.chosen_id.is_some() {
        match theorem1_bounds(&sel, n, cfg) {
            Ok(b) => {
                sel.err_bound = Some(b.err_bound);
                sel.run_bound_gap_ms = b.run_gap_ms;
            }
            Err(e) => log::warn!("no generalization bound: {e}"),
        }
    }
    Ok(sel)
}

/// Fastest zero-error solver; ties by smallest id.
pub fn choose(stats: &[SolverStats]) -> Option<String> {
    stats
        .iter()
        .filter(|s| s.empirical_err == 0.0)
        .min_by(|a, b| {
            a.empirical_run_ms
                .total_cmp(&b.empirical_run_ms)
                .then_with(|| a.solver_id.cmp(&b.solver_id))
        })
        .map(|s| s.solver_id.clone())
}

/// errBound = (Gamma(chosen) + ln(2/delta)) / n and, per zero-error
/// comparator c, runGap = 2 T_max sqrt((max(Gamma(chosen), Gamma(c)) + ln(4/delta)) / (2n)).
pub fn theorem1_bounds(sel: &ErmSelection, n: usize, cfg: &ErmConfig) -> Result<Theorem1Bounds> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let chosen = sel.chosen_id.as_deref().ok_or(Error::NoCandidate)?;
    let g_hat = cfg.complexity(chosen);
    if !g_hat.is_finite() {
        return Err(Error::InvalidParameter(format!("chosen solver {chosen} has zero prior mass")));
    }
    let nf = n as f64;
    let err_bound = (g_hat + (2.0 / cfg.delta).ln()) / nf;
    let run_gap_ms = sel
        .stats
        .iter()
        .filter(|s| s.empirical_err == 0.0)
        .filter_map(|s| {
            let g = cfg.complexity(&s.solver_id);
            g.is_finite().then(|| {
                let gap = 2.0 * cfg.t_max_ms * ((g_hat.max(g) + (4.0 / cfg.delta).ln()) / (2.0 * nf)).sqrt();
                (s.solver_id.clone(), gap)
            })
        })
        .collect();
    Ok(Theorem1Bounds { err_bound, run_gap_ms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::{broken_solver, DiagnosticTrace, FnSolver};
    use crate::instance::{Certification, EvaluatorData, Graph, Payload, ProblemClass, PublicInstance, Solution};

    fn triangle() -> Instance {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        Instance {
            public: PublicInstance::new("tri", ProblemClass::Coloring, Payload::Graph(g)).unwrap(),
            evaluator: EvaluatorData {
                family_id: "test/triangle".into(),
                hidden_rule_metadata: BTreeMap::new(),
                optimum_value: 3.0,
                optimum_solution: None,
                certification: Certification::Oracle,
            },
        }
    }

    fn sleeper(id: &str, ms: u64) -> SolverRef {
        FnSolver::new(id, ProblemClass::Coloring, move |_, _| {
            std::thread::sleep(std::time::Duration::from_millis(ms));
            Ok((Solution::Coloring(vec![0, 1, 2]), DiagnosticTrace::default()))
        })
        .shared()
    }

    fn uniform(lib: &[SolverRef]) -> ErmConfig {
        let mut c = ErmConfig::for_library(lib, 0.05);
        c.parallel = false;
        c
    }

    #[test]
    fn picks_faster_consistent_solver() {
        let lib = vec![sleeper("slow", 5), sleeper("fast", 2)];
        let sel = select_erm(&lib, &[triangle(), triangle()], &uniform(&lib)).unwrap();
        assert_eq!(sel.chosen_id.as_deref(), Some("fast"));
    }

    #[test]
    fn inconsistent_solver_excluded() {
        let lib = vec![broken_solver(ProblemClass::Coloring).shared(), sleeper("ok", 1)];
        let sel = select_erm(&lib, &[triangle()], &uniform(&lib)).unwrap();
        assert_eq!(sel.chosen_id.as_deref(), Some("ok"));
        assert_eq!(sel.stats[0].empirical_err, 1.0);
    }

    #[test]
    fn no_feasible_solver_is_explicit() {
        let lib = vec![broken_solver(ProblemClass::Coloring).shared()];
        let sel = select_erm(&lib, &[triangle()], &uniform(&lib)).unwrap();
        assert!(sel.no_feasible_solver && sel.chosen_id.is_none());
        assert!(theorem1_bounds(&sel, 1, &uniform(&lib)).is_err());
    }

    #[test]
    fn bound_algebra() {
        let cfg = ErmConfig {
            delta: 0.05,
            t_max_ms: 10_000.0,
            prior: (0..8).map(|i| (format!("s{i}"), 1.0 / 8.0)).collect(),
            failure_runtime_ms: 10_000.0,
            dataset_seed: 0,
            parallel: false,
        };
        let sel = ErmSelection {
            chosen_id: Some("s0".into()),
            no_feasible_solver: false,
            n: 100,
            stats: (0..8)
                .map(|i| SolverStats {
                    solver_id: format!("s{i}"),
                    empirical_err: 0.0,
                    empirical_run_ms: 1.0,
                    crashes: 0,
                })
                .collect(),
            err_bound: None,
            run_bound_gap_ms: BTreeMap::new(),
        };
        let b = theorem1_bounds(&sel, 100, &cfg).unwrap();
        assert!((b.err_bound - (8f64.ln() + 40f64.ln()) / 100.0).abs() < 1e-15);
        assert!((b.err_bound - 0.0577).abs() < 1e-4);
        let b4 = theorem1_bounds(&sel, 400, &cfg).unwrap();
        let gaps: Vec<f64> = b.run_gap_ms.values().copied().collect();
        assert!(gaps.windows(2).all(|w| w[0] == w[1]));
        assert!((b.run_gap_ms["s3"] / b4.run_gap_ms["s3"] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn prior_must_not_exceed_one() {
        let mut cfg = uniform(&[sleeper("a", 0)]);
        cfg.prior.insert("b".into(), 0.5);
        assert!(cfg.validate().is_err());
    }
}
