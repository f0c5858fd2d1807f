//! Held-out evaluation: a learned method against the heuristic pool (and
//! optionally the exact oracle) on each target's test split, with repeat
//! averaging, runtime clipping, quality lifts and geometric-mean speedups.

pub mod dataset_io;
mod methods;
mod perturb;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use methods::{ErmMethod, FixedSolverMethod, Method, SelectionData, SynthesisMethod};
pub use perturb::{aggregate_perturbations, run_perturbation_ablation, PerturbationReport, PerturbationSummary};

use crate::error::{Error, Result};
use crate::generators::TargetDataset;
use crate::heuristics::{catalog, exact_solver, run_measured, Clock, DiagnosticTrace, RunConfig, SolverRef, DEFAULT_CLIP_MS};
use crate::instance::{Instance, ProblemClass};
use crate::oracles::OracleBudget;

pub const DEFAULT_REPEATS: usize = 10;
/// Quality values closer than this count as unchanged.
pub const QUALITY_CHANGE_TOL: f64 = 1e-12;
/// Runtimes are floored here before forming ratios.
pub const RUNTIME_FLOOR_MS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchConfig {
    pub repeats: usize,
    pub clip_ms: f64,
    pub seed: u64,
    pub serial_timing: bool,
    pub failure_runtime_ms: f64,
    /// Also run the exact oracle under `exact_budget_s` as a comparator.
    pub include_exact: bool,
    pub exact_budget_s: f64,
    pub clock: Clock,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repeats: DEFAULT_REPEATS,
            clip_ms: DEFAULT_CLIP_MS,
            seed: 0,
            serial_timing: false,
            failure_runtime_ms: DEFAULT_CLIP_MS,
            include_exact: false,
            exact_budget_s: 10.0,
            clock: Clock::Wall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Method,
    Heuristic,
    Exact,
}

/// One measured solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunLog {
    pub target: String,
    pub class: ProblemClass,
    pub solver_id: String,
    pub role: Role,
    pub repeat: usize,
    pub instance_id: String,
    pub feasible: bool,
    pub quality: f64,
    pub optimal: bool,
    pub runtime_ms: f64,
    pub crashed: bool,
    pub trace: DiagnosticTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverRow {
    pub target: String,
    pub solver_id: String,
    pub role: Role,
    pub mean_quality: f64,
    pub optimality_rate: f64,
    pub feasibility_rate: f64,
    /// Heuristic runtimes are clipped per run before averaging.
    pub mean_runtime_ms: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PoolAverage {
    pub mean_quality: f64,
    pub optimality_rate: f64,
    pub feasibility_rate: f64,
    pub mean_runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetSummary {
    pub target: String,
    pub class: ProblemClass,
    pub method: SolverRow,
    pub best_heuristic: SolverRow,
    pub avg_heuristic: PoolAverage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<SolverRow>,
    pub delta_q_avg: f64,
    pub delta_q_best: f64,
    pub speedup_vs_best: f64,
    pub speedup_vs_avg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speedup_vs_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregates {
    pub targets: usize,
    pub mean_quality: f64,
    pub mean_optimality: f64,
    pub mean_feasibility: f64,
    pub delta_q_avg: f64,
    pub delta_q_best: f64,
    pub geo_speedup_vs_best: f64,
    pub geo_speedup_vs_avg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geo_speedup_vs_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticsRow {
    pub scope: String,
    pub shortcut_rate: f64,
    pub fallback_rate: f64,
    pub mean_residual_size: f64,
    pub mean_repair_iterations: f64,
    /// Targets averaged (class and overall rows) or instances (target rows).
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticsReport {
    pub per_target: Vec<DiagnosticsRow>,
    pub per_class: Vec<DiagnosticsRow>,
    pub overall: DiagnosticsRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfigEcho {
    pub bench: BenchConfig,
    pub method: String,
    pub quality_change_tol: f64,
    pub runtime_floor_ms: f64,
    pub catalog: BTreeMap<String, serde_json::Value>,
    pub timing_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub config: ConfigEcho,
    pub rows: Vec<SolverRow>,
    pub targets: Vec<TargetSummary>,
    pub aggregates: Aggregates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsReport>,
    pub logs: Vec<RunLog>,
}

pub fn geometric_mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
}

pub fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// The runtime that enters averages and ratios for a run.
pub fn effective_runtime(log: &RunLog, clip_ms: f64) -> f64 {
    match log.role {
        Role::Heuristic => log.runtime_ms.min(clip_ms),
        _ => log.runtime_ms,
    }
}

/// Row for one (target, role, solver) group of logs.
pub fn summarize(logs: &[&RunLog], clip_ms: f64) -> Result<SolverRow> {
    let first = logs.first().ok_or(Error::EmptyInput("run logs"))?;
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    Ok(SolverRow {
        target: first.target.clone(),
        solver_id: first.solver_id.clone(),
        role: first.role,
        mean_quality: mean(logs.iter().map(|l| l.quality)),
        optimality_rate: mean(logs.iter().map(|l| b(l.optimal))),
        feasibility_rate: mean(logs.iter().map(|l| b(l.feasible))),
        mean_runtime_ms: mean(logs.iter().map(|l| effective_runtime(l, clip_ms))),
        runs: logs.len(),
    })
}

fn ratio(baseline_ms: f64, method_ms: f64) -> f64 {
    baseline_ms.max(RUNTIME_FLOOR_MS) / method_ms.max(RUNTIME_FLOOR_MS)
}

/// Quality-best heuristic: quality, then optimality, then runtime, then id.
pub fn best_heuristic(rows: &[SolverRow]) -> Option<&SolverRow> {
    rows.iter().filter(|r| r.role == Role::Heuristic).min_by(|a, b| {
        b.mean_quality
            .total_cmp(&a.mean_quality)
            .then(b.optimality_rate.total_cmp(&a.optimality_rate))
            .then(a.mean_runtime_ms.total_cmp(&b.mean_runtime_ms))
            .then_with(|| a.solver_id.cmp(&b.solver_id))
    })
}

/// Rebuilds rows, per-target summaries and aggregates from raw logs.
pub fn aggregate_logs(logs: &[RunLog], clip_ms: f64) -> Result<(Vec<SolverRow>, Vec<TargetSummary>, Aggregates)> {
    let mut groups: BTreeMap<(String, Role, String), Vec<&RunLog>> = BTreeMap::new();
    let mut classes = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for l in logs {
        if classes.insert(l.target.clone(), l.class).is_none() {
            order.push(l.target.clone());
        }
        groups
            .entry((l.target.clone(), l.role, l.solver_id.clone()))
            .or_default()
            .push(l);
    }
    let rows: Vec<SolverRow> = groups.values().map(|g| summarize(g, clip_ms)).collect::<Result<_>>()?;
    let mut targets = Vec::new();
    for t in &order {
        let mine: Vec<SolverRow> = rows.iter().filter(|r| &r.target == t).cloned().collect();
        let method = mine
            .iter()
            .find(|r| r.role == Role::Method)
            .cloned()
            .ok_or_else(|| Error::Evaluation(format!("target {t} has no method runs")))?;
        let best = best_heuristic(&mine)
            .cloned()
            .ok_or_else(|| Error::Evaluation(format!("target {t} has no heuristic runs")))?;
        let heur: Vec<&SolverRow> = mine.iter().filter(|r| r.role == Role::Heuristic).collect();
        let avg = PoolAverage {
            mean_quality: mean(heur.iter().map(|r| r.mean_quality)),
            optimality_rate: mean(heur.iter().map(|r| r.optimality_rate)),
            feasibility_rate: mean(heur.iter().map(|r| r.feasibility_rate)),
            mean_runtime_ms: mean(heur.iter().map(|r| r.mean_runtime_ms)),
        };
        let exact = mine.iter().find(|r| r.role == Role::Exact).cloned();
        targets.push(TargetSummary {
            target: t.clone(),
            class: classes[t],
            delta_q_avg: method.mean_quality - avg.mean_quality,
            delta_q_best: method.mean_quality - best.mean_quality,
            speedup_vs_best: ratio(best.mean_runtime_ms, method.mean_runtime_ms),
            speedup_vs_avg: ratio(avg.mean_runtime_ms, method.mean_runtime_ms),
            speedup_vs_exact: exact.as_ref().map(|e| ratio(e.mean_runtime_ms, method.mean_runtime_ms)),
            method,
            best_heuristic: best,
            avg_heuristic: avg,
            exact,
        });
    }
    if targets.is_empty() {
        return Err(Error::EmptyInput("benchmark targets"));
    }
    let exact_ratios: Option<Vec<f64>> = targets.iter().map(|t| t.speedup_vs_exact).collect();
    let agg = Aggregates {
        targets: targets.len(),
        mean_quality: mean(targets.iter().map(|t| t.method.mean_quality)),
        mean_optimality: mean(targets.iter().map(|t| t.method.optimality_rate)),
        mean_feasibility: mean(targets.iter().map(|t| t.method.feasibility_rate)),
        delta_q_avg: mean(targets.iter().map(|t| t.delta_q_avg)),
        delta_q_best: mean(targets.iter().map(|t| t.delta_q_best)),
        geo_speedup_vs_best: geometric_mean(&targets.iter().map(|t| t.speedup_vs_best).collect::<Vec<_>>()),
        geo_speedup_vs_avg: geometric_mean(&targets.iter().map(|t| t.speedup_vs_avg).collect::<Vec<_>>()),
        geo_speedup_vs_exact: exact_ratios.map(|r| geometric_mean(&r)),
    };
    Ok((rows, targets, agg))
}

/// Two-level diagnostics: instance means within each target, then class
/// rows average their targets and the overall row averages all targets.
pub fn aggregate_diagnostics(traces: &[(String, ProblemClass, DiagnosticTrace)]) -> Result<DiagnosticsReport> {
    if traces.is_empty() {
        return Err(Error::EmptyInput("diagnostic traces"));
    }
    let mut by_target: BTreeMap<&str, (ProblemClass, Vec<&DiagnosticTrace>)> = BTreeMap::new();
    for (t, c, tr) in traces {
        by_target.entry(t.as_str()).or_insert((*c, Vec::new())).1.push(tr);
    }
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    let per_target: Vec<(ProblemClass, DiagnosticsRow)> = by_target
        .iter()
        .map(|(t, (c, trs))| {
            (
                *c,
                DiagnosticsRow {
                    scope: t.to_string(),
                    shortcut_rate: mean(trs.iter().map(|x| b(x.shortcut_used))),
                    fallback_rate: mean(trs.iter().map(|x| b(x.fallback_used))),
                    mean_residual_size: mean(trs.iter().map(|x| x.residual_size)),
                    mean_repair_iterations: mean(trs.iter().map(|x| x.repair_iterations as f64)),
                    count: trs.len(),
                },
            )
        })
        .collect();
    let average = |scope: String, rows: &[&DiagnosticsRow]| DiagnosticsRow {
        scope,
        shortcut_rate: mean(rows.iter().map(|r| r.shortcut_rate)),
        fallback_rate: mean(rows.iter().map(|r| r.fallback_rate)),
        mean_residual_size: mean(rows.iter().map(|r| r.mean_residual_size)),
        mean_repair_iterations: mean(rows.iter().map(|r| r.mean_repair_iterations)),
        count: rows.len(),
    };
    let mut per_class = Vec::new();
    for class in ProblemClass::ALL {
        let rows: Vec<&DiagnosticsRow> = per_target.iter().filter(|(c, _)| *c == class).map(|(_, r)| r).collect();
        if !rows.is_empty() {
            per_class.push(average(class.to_string(), &rows));
        }
    }
    let all: Vec<&DiagnosticsRow> = per_target.iter().map(|(_, r)| r).collect();
    let overall = average("all".into(), &all);
    Ok(DiagnosticsReport {
        per_target: per_target.into_iter().map(|(_, r)| r).collect(),
        per_class,
        overall,
    })
}

/// Measures `solver` on every test instance `repeats` times.
pub fn measure_solver(
    target: &str,
    solver: &SolverRef,
    role: Role,
    test: &[Instance],
    cfg: &BenchConfig,
) -> Result<Vec<RunLog>> {
    let run_cfg = RunConfig {
        dataset_seed: cfg.seed,
        failure_runtime_ms: cfg.failure_runtime_ms,
        clock: cfg.clock,
    };
    let jobs: Vec<(usize, &Instance)> = (0..cfg.repeats).flat_map(|r| test.iter().map(move |i| (r, i))).collect();
    let one = |&(repeat, inst): &(usize, &Instance)| -> Result<RunLog> {
        let m = run_measured(solver.as_ref(), inst, &run_cfg)?;
        Ok(RunLog {
            target: target.to_string(),
            class: inst.class(),
            solver_id: solver.id().to_string(),
            role,
            repeat,
            instance_id: inst.id().to_string(),
            feasible: m.scored.feasible,
            quality: m.scored.quality,
            optimal: m.scored.optimal,
            runtime_ms: m.wall_clock_ms,
            crashed: m.crashed,
            trace: m.trace,
        })
    };
    if cfg.serial_timing {
        jobs.iter().map(one).collect()
    } else {
        jobs.par_iter().map(one).collect()
    }
}

fn echo(cfg: &BenchConfig, method: &str) -> ConfigEcho {
    ConfigEcho {
        bench: cfg.clone(),
        method: method.to_string(),
        quality_change_tol: QUALITY_CHANGE_TOL,
        runtime_floor_ms: RUNTIME_FLOOR_MS,
        catalog: crate::heuristics::catalog_config(),
        timing_note: "runtimes include solver-internal verification, repair and fallback; harness-side scoring is excluded".into(),
    }
}

/// Selects the method on train/validation, then evaluates it, the heuristic
/// pool, and optionally the exact oracle on the test split of every target.
pub fn run_benchmark(datasets: &[TargetDataset], method: &dyn Method, cfg: &BenchConfig) -> Result<EvalReport> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput("benchmark targets"));
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let mut logs = Vec::new();
    for d in datasets {
        let target = d.target_name();
        let class = d.spec.problem_class;
        if d.test.is_empty() {
            return Err(Error::EmptyInput("test split"));
        }
        let chosen = method.select(&SelectionData {
            target: &target,
            class,
            train: &d.train,
            val: &d.val,
        })?;
        if chosen.class() != class {
            return Err(Error::ClassMismatch {
                expected: class,
                actual: chosen.class(),
            });
        }
        log::info!("{target}: method {} chose {}", method.name(), chosen.id());
        logs.extend(measure_solver(&target, &chosen, Role::Method, &d.test, cfg)?);
        for h in catalog(class) {
            logs.extend(measure_solver(&target, &h, Role::Heuristic, &d.test, cfg)?);
        }
        if cfg.include_exact {
            let budget = OracleBudget {
                max_seconds: cfg.exact_budget_s,
                ..OracleBudget::default()
            };
            let exact = exact_solver(class, budget).shared();
            logs.extend(measure_solver(&target, &exact, Role::Exact, &d.test, cfg)?);
        }
    }
    report_from_logs(logs, cfg, method.name())
}

/// [`run_benchmark`] over dataset directories written by [`dataset_io::write_dataset`].
pub fn run_benchmark_dirs(dirs: &[&Path], method: &dyn Method, cfg: &BenchConfig) -> Result<EvalReport> {
    let datasets: Vec<TargetDataset> = dirs.iter().map(|d| dataset_io::read_dataset(d)).collect::<Result<_>>()?;
    run_benchmark(&datasets, method, cfg)
}

pub fn report_from_logs(logs: Vec<RunLog>, cfg: &BenchConfig, method: &str) -> Result<EvalReport> {
    let (rows, targets, aggregates) = aggregate_logs(&logs, cfg.clip_ms)?;
    let traces: Vec<(String, ProblemClass, DiagnosticTrace)> = logs
        .iter()
        .filter(|l| l.role == Role::Method && l.repeat == 0)
        .map(|l| (l.target.clone(), l.class, l.trace))
        .collect();
    Ok(EvalReport {
        config: echo(cfg, method),
        rows,
        targets,
        aggregates,
        diagnostics: aggregate_diagnostics(&traces).ok(),
        logs,
    })
}

/// One CSV line per target, laid out like a per-target results table.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    target: &'a str,
    method_solver: &'a str,
    method_q: f64,
    method_opt: f64,
    method_t_ms: f64,
    best_heuristic: &'a str,
    best_q: f64,
    best_opt: f64,
    best_t_ms: f64,
    avg_q: f64,
    avg_opt: f64,
    avg_t_ms: f64,
    exact_q: Option<f64>,
    exact_opt: Option<f64>,
    exact_t_ms: Option<f64>,
    delta_q_avg: f64,
    delta_q_best: f64,
    speedup_vs_best: f64,
}

pub fn write_csv(report: &EvalReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    for t in &report.targets {
        w.serialize(CsvRow {
            target: &t.target,
            method_solver: &t.method.solver_id,
            method_q: t.method.mean_quality,
            method_opt: t.method.optimality_rate,
            method_t_ms: t.method.mean_runtime_ms,
            best_heuristic: &t.best_heuristic.solver_id,
            best_q: t.best_heuristic.mean_quality,
            best_opt: t.best_heuristic.optimality_rate,
            best_t_ms: t.best_heuristic.mean_runtime_ms,
            avg_q: t.avg_heuristic.mean_quality,
            avg_opt: t.avg_heuristic.optimality_rate,
            avg_t_ms: t.avg_heuristic.mean_runtime_ms,
            exact_q: t.exact.as_ref().map(|e| e.mean_quality),
            exact_opt: t.exact.as_ref().map(|e| e.optimality_rate),
            exact_t_ms: t.exact.as_ref().map(|e| e.mean_runtime_ms),
            delta_q_avg: t.delta_q_avg,
            delta_q_best: t.delta_q_best,
            speedup_vs_best: t.speedup_vs_best,
        })
        .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path` as JSON and a sibling `.csv` table.
pub fn write_report(report: &EvalReport, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)?)?;
    write_csv(report, &path.with_extension("csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(target: &str, solver: &str, role: Role, q: f64, t: f64) -> RunLog {
        RunLog {
            target: target.into(),
            class: ProblemClass::Mis,
            solver_id: solver.into(),
            role,
            repeat: 0,
            instance_id: "x".into(),
            feasible: true,
            quality: q,
            optimal: q == 1.0,
            runtime_ms: t,
            crashed: false,
            trace: DiagnosticTrace::default(),
        }
    }

    #[test]
    fn geometric_mean_of_two_and_eight() {
        assert!((geometric_mean(&[2.0, 8.0]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn heuristic_runtime_clipped_before_ratio() {
        let logs = vec![
            log("a", "m", Role::Method, 1.0, 100.0),
            log("a", "h", Role::Heuristic, 1.0, 12_000.0),
        ];
        let (_, t, _) = aggregate_logs(&logs, 10_000.0).unwrap();
        assert_eq!(t[0].best_heuristic.mean_runtime_ms, 10_000.0);
        assert_eq!(t[0].speedup_vs_best, 100.0);
    }

    #[test]
    fn best_heuristic_tie_breaks() {
        let logs = vec![
            log("a", "m", Role::Method, 0.5, 1.0),
            log("a", "slow", Role::Heuristic, 0.9, 5.0),
            log("a", "fast", Role::Heuristic, 0.9, 2.0),
            log("a", "bad", Role::Heuristic, 0.1, 1.0),
        ];
        let (_, t, agg) = aggregate_logs(&logs, 10_000.0).unwrap();
        assert_eq!(t[0].best_heuristic.solver_id, "fast");
        assert!((agg.delta_q_best + 0.4).abs() < 1e-12);
        assert!((agg.delta_q_avg - (0.5 - 1.9 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_rates() {
        let tr = |s: bool, f: bool| DiagnosticTrace {
            shortcut_used: s,
            fallback_used: f,
            residual_size: 0.0,
            repair_iterations: 0,
        };
        let all: Vec<_> = (0..4).map(|_| ("t".to_string(), ProblemClass::Mis, tr(true, false))).collect();
        assert_eq!(aggregate_diagnostics(&all).unwrap().overall.shortcut_rate, 1.0);
        let mixed: Vec<_> = [true, true, true, false]
            .iter()
            .map(|&f| ("t".to_string(), ProblemClass::Mis, tr(false, f)))
            .collect();
        assert_eq!(aggregate_diagnostics(&mixed).unwrap().overall.fallback_rate, 0.75);
        assert!(aggregate_diagnostics(&[]).is_err());
    }
}
