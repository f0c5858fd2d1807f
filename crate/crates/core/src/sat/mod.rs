//! Horn-SAT, DPLL, salience-based backdoor recovery, and the compiled
//! enumerate-then-Horn-solve solver.

mod backdoor;
mod dpll;
mod horn;
mod salience;

use serde::{Deserialize, Serialize};

pub use backdoor::{
    measure_speedup, restrict, solve_with_backdoor, BackdoorRun, CompiledBackdoorSolver, SpeedupReport,
    MAX_BACKDOOR_BITS,
};
pub use dpll::dpll;
pub use horn::horn_sat;
pub use salience::{
    estimate_salience, recover_backdoor, salience, salience_vector, theorem3_samples, top_k, SalienceProfile,
};

use crate::error::Result;
use crate::heuristics::{maxsat::greedy_flip, DiagnosticTrace, MeasuredSolver, FLIP_RESTARTS};
use crate::instance::{ProblemClass, PublicInstance, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "assignment", rename_all = "lowercase")]
pub enum SatResult {
    Sat(Vec<bool>),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// MaxSAT-class solver built from a compiled backdoor solver. A satisfying
/// assignment is optimal; on UNSAT it returns greedy-flip's assignment.
pub struct BackdoorMaxSatSolver {
    id: String,
    solver: CompiledBackdoorSolver,
}

impl BackdoorMaxSatSolver {
    pub fn new(id: impl Into<String>, solver: CompiledBackdoorSolver) -> Self {
        BackdoorMaxSatSolver { id: id.into(), solver }
    }

    pub fn backdoor(&self) -> &[usize] {
        &self.solver.backdoor
    }
}

impl MeasuredSolver for BackdoorMaxSatSolver {
    fn id(&self) -> &str {
        &self.id
    }

    fn class(&self) -> ProblemClass {
        ProblemClass::MaxSat
    }

    fn solve(&self, inst: &PublicInstance, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
        let f = inst.cnf()?;
        let run = self.solver.solve(f)?;
        let a = match run.result {
            SatResult::Sat(a) => a,
            SatResult::Unsat => greedy_flip(f, seed, FLIP_RESTARTS),
        };
        Ok((Solution::Assignment(a), run.trace))
    }
}
