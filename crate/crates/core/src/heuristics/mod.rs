//! The heuristic baseline pool behind a uniform measured-solver interface.
//!
//! Solvers see only a [`PublicInstance`]. [`run_measured`] times the solve
//! call, scores the output against the evaluator's optimum, and turns panics
//! and solver errors into zero-quality runs charged a fixed failure runtime.

pub mod coloring;
pub mod maxsat;
pub mod mds;
pub mod mis;
pub mod packing;
pub mod tsp;

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::{Instance, ProblemClass, PublicInstance, Solution};
use crate::oracles::{solve_exact, OracleBudget};
use crate::rng;
use crate::verify::{quality, ScoredResult};

/// Harness clip and default failure runtime, in milliseconds.
pub const DEFAULT_CLIP_MS: f64 = 10_000.0;

/// Random restarts for the multi-start TSP local search.
pub const TWO_OPT_STARTS: usize = 8;
/// Pass cap for every 2-opt run.
pub const TWO_OPT_MAX_PASSES: usize = 1_000;
/// Restarts for MaxSAT flip local search (the first starts from literal majority).
pub const FLIP_RESTARTS: usize = 4;
/// Swap-pass cap for the redundancy-improved knapsack greedy.
pub const MDKP_SWAP_PASSES: usize = 20;
/// LP budget for the knapsack rounding heuristic.
pub const LP_ROUNDING_BUDGET: OracleBudget = OracleBudget {
    max_seconds: 2.0,
    max_states: 200_000,
};

/// Solver-side diagnostics shared by every solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticTrace {
    pub shortcut_used: bool,
    pub fallback_used: bool,
    pub residual_size: f64,
    pub repair_iterations: u64,
}

impl DiagnosticTrace {
    pub fn repaired(iterations: u64) -> Self {
        DiagnosticTrace {
            repair_iterations: iterations,
            ..Self::default()
        }
    }
}

/// A solver for one problem class.
pub trait MeasuredSolver: Send + Sync {
    fn id(&self) -> &str;
    fn class(&self) -> ProblemClass;
    /// Declared prior weight in (0, 1].
    fn prior_weight(&self) -> f64 {
        1.0
    }
    /// Deterministic given `(inst, seed)`.
    fn solve(&self, inst: &PublicInstance, seed: u64) -> Result<(Solution, DiagnosticTrace)>;
}

impl fmt::Debug for dyn MeasuredSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.id(), self.class())
    }
}

pub type SolverRef = Arc<dyn MeasuredSolver>;

type SolveFn = dyn Fn(&PublicInstance, u64) -> Result<(Solution, DiagnosticTrace)> + Send + Sync;

/// A solver built from a closure.
pub struct FnSolver {
    id: String,
    class: ProblemClass,
    prior: f64,
    run: Box<SolveFn>,
}

impl FnSolver {
    pub fn new(
        id: impl Into<String>,
        class: ProblemClass,
        run: impl Fn(&PublicInstance, u64) -> Result<(Solution, DiagnosticTrace)> + Send + Sync + 'static,
    ) -> Self {
        FnSolver {
            id: id.into(),
            class,
            prior: 1.0,
            run: Box::new(run),
        }
    }

    pub fn with_prior(mut self, prior: f64) -> Self {
        self.prior = prior;
        self
    }

    pub fn shared(self) -> SolverRef {
        Arc::new(self)
    }
}

impl MeasuredSolver for FnSolver {
    fn id(&self) -> &str {
        &self.id
    }

    fn class(&self) -> ProblemClass {
        self.class
    }

    fn prior_weight(&self) -> f64 {
        self.prior
    }

    fn solve(&self, inst: &PublicInstance, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
        (self.run)(inst, seed)
    }
}

/// Where measured runtimes come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "ms")]
pub enum Clock {
    /// Monotonic wall clock around the solve call.
    Wall,
    /// Every successful call is charged the same fixed time. Used where runs
    /// must be reproducible byte for byte.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub dataset_seed: u64,
    pub failure_runtime_ms: f64,
    pub clock: Clock,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset_seed: 0,
            failure_runtime_ms: DEFAULT_CLIP_MS,
            clock: Clock::Wall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunMeasurement {
    pub wall_clock_ms: f64,
    pub scored: ScoredResult,
    pub trace: DiagnosticTrace,
    /// The solver panicked, returned an error, or produced a wrong-shape output.
    pub crashed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<Solution>,
}

/// Seed handed to a solver: a function of the dataset seed, solver, and instance.
pub fn solver_seed(dataset_seed: u64, solver_id: &str, instance_id: &str) -> u64 {
    rng::derive_seed(&[dataset_seed, rng::hash_str(solver_id), rng::hash_str(instance_id)])
}

/// Runs `solve` behind a panic barrier.
pub fn guarded_solve(
    s: &dyn MeasuredSolver,
    inst: &PublicInstance,
    seed: u64,
) -> std::result::Result<(Solution, DiagnosticTrace), String> {
    match catch_unwind(AssertUnwindSafe(|| s.solve(inst, seed))) {
        Ok(Ok(out)) => Ok(out),
        Ok(Err(e)) => Err(e.to_string()),
        Err(payload) => Err(payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "solver panicked".into())),
    }
}

/// Times one solve on the public part and scores it.
///
/// Only a class mismatch or an evaluation inconsistency (an output better
/// than the stored optimum) is an error; solver failures become
/// zero-quality runs.
pub fn run_measured(s: &dyn MeasuredSolver, inst: &Instance, cfg: &RunConfig) -> Result<RunMeasurement> {
    if s.class() != inst.class() {
        return Err(Error::ClassMismatch {
            expected: s.class(),
            actual: inst.class(),
        });
    }
    let seed = solver_seed(cfg.dataset_seed, s.id(), inst.id());
    let start = Instant::now();
    let outcome = guarded_solve(s, &inst.public, seed);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let failed = |why: String| {
        log::debug!("solver {} failed on {}: {why}", s.id(), inst.id());
        RunMeasurement {
            wall_clock_ms: cfg.failure_runtime_ms,
            scored: ScoredResult::infeasible(),
            trace: DiagnosticTrace::default(),
            crashed: true,
            solution: None,
        }
    };
    let (sol, trace) = match outcome {
        Ok(out) => out,
        Err(why) => return Ok(failed(why)),
    };
    let scored = match quality(inst, &sol) {
        Ok(s) => s,
        Err(Error::ShapeMismatch(why)) => return Ok(failed(why)),
        Err(e) => return Err(e),
    };
    let wall_clock_ms = match cfg.clock {
        Clock::Wall => elapsed,
        Clock::Fixed(ms) => ms,
    };
    Ok(RunMeasurement {
        wall_clock_ms,
        scored,
        trace,
        crashed: false,
        solution: Some(sol),
    })
}

fn greedy_trace() -> DiagnosticTrace {
    DiagnosticTrace::default()
}

fn rng_for(seed: u64) -> rng::Rng {
    rng::stream(seed, &[0xC47A_1065])
}

/// The baseline catalog for one class.
pub fn catalog(class: ProblemClass) -> Vec<SolverRef> {
    use ProblemClass::*;
    let s = |id: &str, run: fn(&PublicInstance, u64) -> Result<(Solution, DiagnosticTrace)>| {
        FnSolver::new(id, class, run).shared()
    };
    match class {
        Coloring => vec![
            s("dsatur", |i, _| Ok((Solution::Coloring(coloring::dsatur(i.graph()?)), greedy_trace()))),
            s("greedy-largest-degree", |i, _| {
                let g = i.graph()?;
                let order = coloring::largest_degree_order(g);
                Ok((Solution::Coloring(coloring::greedy_in_order(g, &order)), greedy_trace()))
            }),
            s("greedy-random-order", |i, seed| {
                let g = i.graph()?;
                let order = coloring::random_order(g, &mut rng_for(seed));
                Ok((Solution::Coloring(coloring::greedy_in_order(g, &order)), greedy_trace()))
            }),
            s("greedy-smallest-last", |i, _| {
                let g = i.graph()?;
                let order = coloring::smallest_last_order(g);
                Ok((Solution::Coloring(coloring::greedy_in_order(g, &order)), greedy_trace()))
            }),
        ],
        MaxSat => vec![
            s("greedy-flip", |i, seed| {
                let (a, flips) = maxsat::greedy_flip_counted(i.cnf()?, seed, FLIP_RESTARTS);
                Ok((Solution::Assignment(a), DiagnosticTrace::repaired(flips)))
            }),
            s("literal-majority", |i, _| {
                Ok((Solution::Assignment(maxsat::literal_majority(i.cnf()?)), greedy_trace()))
            }),
            s("random-assignment", |i, seed| {
                let a = maxsat::random_assignment(i.cnf()?, &mut rng_for(seed));
                Ok((Solution::Assignment(a), greedy_trace()))
            }),
        ],
        Mis => vec![
            s("min-degree-greedy", |i, _| {
                Ok((Solution::VertexSet(mis::min_degree_greedy(i.graph()?)), greedy_trace()))
            }),
            s("random-greedy", |i, seed| {
                let set = mis::random_greedy(i.graph()?, &mut rng_for(seed));
                Ok((Solution::VertexSet(set), greedy_trace()))
            }),
            s("ratio-greedy", |i, _| {
                Ok((Solution::VertexSet(mis::ratio_greedy(i.graph()?)), greedy_trace()))
            }),
            s("local-improvement", |i, _| {
                let (set, swaps) = mis::local_improvement(i.graph()?);
                Ok((Solution::VertexSet(set), DiagnosticTrace::repaired(swaps)))
            }),
        ],
        Mds => vec![
            s("high-degree-greedy", |i, _| {
                Ok((Solution::VertexSet(mds::high_degree_greedy(i.graph()?)), greedy_trace()))
            }),
            s("marginal-gain-greedy", |i, _| {
                let mut set = mds::marginal_gain_greedy(i.graph()?);
                set.sort_unstable();
                Ok((Solution::VertexSet(set), greedy_trace()))
            }),
            s("redundancy-aware-greedy", |i, _| {
                let (set, removed) = mds::redundancy_aware_greedy(i.graph()?);
                Ok((Solution::VertexSet(set), DiagnosticTrace::repaired(removed)))
            }),
        ],
        PackingLp => vec![
            s("density-greedy", |i, _| {
                Ok((Solution::ItemFractions(packing::lp_density_greedy(i.packing()?)), greedy_trace()))
            }),
            s("uniform-fraction", |i, _| {
                Ok((Solution::ItemFractions(packing::uniform_fraction(i.packing()?)), greedy_trace()))
            }),
        ],
        Mdkp => vec![
            s("value-density-greedy", |i, _| {
                Ok((Solution::ItemPicks(packing::mdkp_density_greedy(i.packing()?)), greedy_trace()))
            }),
            s("redundancy-improved-greedy", |i, _| {
                let (picks, swaps) = packing::mdkp_redundancy_greedy(i.packing()?, MDKP_SWAP_PASSES);
                Ok((Solution::ItemPicks(picks), DiagnosticTrace::repaired(swaps)))
            }),
            s("lp-rounding", |i, _| {
                let p = i.packing()?;
                match packing::mdkp_lp_rounding(p, LP_ROUNDING_BUDGET) {
                    Some(picks) => Ok((Solution::ItemPicks(picks), greedy_trace())),
                    None => {
                        log::info!("lp-rounding: LP over budget on {}, using density greedy", i.id);
                        let trace = DiagnosticTrace {
                            fallback_used: true,
                            ..greedy_trace()
                        };
                        Ok((Solution::ItemPicks(packing::mdkp_density_greedy(p)), trace))
                    }
                }
            }),
        ],
        Tsp => vec![
            s("random-tour", |i, seed| {
                Ok((Solution::Tour(tsp::random_tour(i.tsp()?, &mut rng_for(seed))), greedy_trace()))
            }),
            s("nearest-neighbor", |i, _| {
                let d = i.tsp()?.distance_matrix();
                Ok((Solution::Tour(tsp::nearest_neighbor(&d, 0)), greedy_trace()))
            }),
            s("nearest-insertion", |i, _| {
                let d = i.tsp()?.distance_matrix();
                Ok((Solution::Tour(tsp::insertion(&d, false)), greedy_trace()))
            }),
            s("farthest-insertion", |i, _| {
                let d = i.tsp()?.distance_matrix();
                Ok((Solution::Tour(tsp::insertion(&d, true)), greedy_trace()))
            }),
            two_opt_solver("multi-start-2opt", TwoOptStart::Random(TWO_OPT_STARTS), TWO_OPT_MAX_PASSES).shared(),
            two_opt_solver("nn-2opt", TwoOptStart::NearestNeighbor, TWO_OPT_MAX_PASSES).shared(),
            two_opt_solver("farthest-insertion-2opt", TwoOptStart::FarthestInsertion, TWO_OPT_MAX_PASSES)
                .shared(),
        ],
    }
}

/// Starting tours for 2-opt solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoOptStart {
    Random(usize),
    NearestNeighbor,
    FarthestInsertion,
}

/// A 2-opt solver with explicit budgets, so refiners can tune them.
pub fn two_opt_solver(id: &str, start: TwoOptStart, max_passes: usize) -> FnSolver {
    FnSolver::new(id, ProblemClass::Tsp, move |i, seed| {
        let t = i.tsp()?;
        let d = t.distance_matrix();
        let (tour, passes) = match start {
            TwoOptStart::Random(starts) => {
                tsp::multi_start_two_opt(t, &d, starts, max_passes, &mut rng_for(seed))
            }
            TwoOptStart::NearestNeighbor => {
                let mut tour = tsp::nearest_neighbor(&d, 0);
                let p = tsp::two_opt(&d, &mut tour, max_passes);
                (tour, p)
            }
            TwoOptStart::FarthestInsertion => {
                let mut tour = tsp::insertion(&d, true);
                let p = tsp::two_opt(&d, &mut tour, max_passes);
                (tour, p)
            }
        };
        Ok((Solution::Tour(tour), DiagnosticTrace::repaired(passes)))
    })
}

/// Looks up a catalog solver, or one of the special solvers: `exact`,
/// `crash`, and `broken`.
pub fn by_id(class: ProblemClass, id: &str) -> Result<SolverRef> {
    match id {
        "exact" => Ok(exact_solver(class, OracleBudget::default()).shared()),
        "crash" => Ok(crashing_solver(class).shared()),
        "broken" => Ok(broken_solver(class).shared()),
        _ => catalog(class)
            .into_iter()
            .find(|s| s.id() == id)
            .ok_or_else(|| Error::UnknownSolver(format!("{id} (class {class})"))),
    }
}

/// Fixed constants used by the catalog, echoed in reports.
pub fn catalog_config() -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("twoOptStarts".into(), Value::from(TWO_OPT_STARTS)),
        ("twoOptMaxPasses".into(), Value::from(TWO_OPT_MAX_PASSES)),
        ("flipRestarts".into(), Value::from(FLIP_RESTARTS)),
        ("mdkpSwapPasses".into(), Value::from(MDKP_SWAP_PASSES)),
        ("lpRoundingMaxSeconds".into(), Value::from(LP_ROUNDING_BUDGET.max_seconds)),
        ("lpRoundingMaxStates".into(), Value::from(LP_ROUNDING_BUDGET.max_states)),
    ])
}

/// Wraps the exact oracle as a solver.
pub fn exact_solver(class: ProblemClass, budget: OracleBudget) -> FnSolver {
    FnSolver::new("exact", class, move |i, _| {
        let (_, sol) = solve_exact(i, budget)?;
        Ok((sol, DiagnosticTrace::default()))
    })
}

/// Always panics.
pub fn crashing_solver(class: ProblemClass) -> FnSolver {
    FnSolver::new("crash", class, |i, _| panic!("crash stub invoked on {}", i.id))
}

/// Fast but wrong: returns an output of the right shape that is infeasible
/// whenever the instance has any constraint to break.
pub fn broken_solver(class: ProblemClass) -> FnSolver {
    FnSolver::new("broken", class, move |i, _| {
        let sol = match class {
            ProblemClass::Coloring => Solution::Coloring(vec![0; i.graph()?.n]),
            ProblemClass::Mis => Solution::VertexSet((0..i.graph()?.n).collect()),
            ProblemClass::Mds => Solution::VertexSet(Vec::new()),
            ProblemClass::MaxSat => Solution::Assignment(Vec::new()),
            ProblemClass::PackingLp => Solution::ItemFractions(vec![1.0; i.packing()?.num_items()]),
            ProblemClass::Mdkp => Solution::ItemPicks(vec![true; i.packing()?.num_items()]),
            ProblemClass::Tsp => Solution::Tour(vec![0; i.tsp()?.n]),
        };
        Ok((sol, DiagnosticTrace::default()))
    })
}

/// Delays another solver by a fixed sleep.
pub struct Slowed {
    pub inner: SolverRef,
    pub delay: Duration,
    id: String,
}

impl Slowed {
    pub fn new(inner: SolverRef, delay: Duration) -> Self {
        let id = format!("{}+sleep{}ms", inner.id(), delay.as_millis());
        Slowed { inner, delay, id }
    }
}

impl MeasuredSolver for Slowed {
    fn id(&self) -> &str {
        &self.id
    }

    fn class(&self) -> ProblemClass {
        self.inner.class()
    }

    fn prior_weight(&self) -> f64 {
        self.inner.prior_weight()
    }

    fn solve(&self, inst: &PublicInstance, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
        std::thread::sleep(self.delay);
        self.inner.solve(inst, seed)
    }
}
