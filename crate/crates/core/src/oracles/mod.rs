//! Exact solvers for desk-scale instances.
//!
//! These certify generator optima and serve as ground truth in tests. They are
//! deliberately plain: correctness first, with an explicit [`OracleBudget`]
//! whose exhaustion is an error rather than a silently inexact answer.

mod coloring;
mod lp;
pub(crate) mod maxsat;
mod mdkp;
mod sets;
mod tsp;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use coloring::exact_coloring;
pub use lp::exact_lp;
pub use maxsat::exact_maxsat;
pub use mdkp::exact_mdkp;
pub use sets::{exact_mds, exact_mis};
pub use tsp::exact_tsp;

use crate::error::{Error, Result};
use crate::instance::{PublicInstance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleBudget {
    pub max_seconds: f64,
    pub max_states: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_seconds: 10.0,
            max_states: 200_000_000,
        }
    }
}

impl OracleBudget {
    pub fn new(max_seconds: f64, max_states: u64) -> Result<Self> {
        if !(max_seconds > 0.0) || max_states == 0 {
            return Err(Error::InvalidParameter("oracle budget must be positive".into()));
        }
        Ok(OracleBudget {
            max_seconds,
            max_states,
        })
    }
}

/// Counts search states and checks the wall clock every 4096 states.
pub(crate) struct Meter {
    budget: OracleBudget,
    start: Instant,
    states: u64,
}

impl Meter {
    pub(crate) fn new(budget: OracleBudget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            states: 0,
        }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.states += 1;
        if self.states > self.budget.max_states
            || (self.states & 0xFFF == 0
                && self.start.elapsed().as_secs_f64() > self.budget.max_seconds)
        {
            return Err(Error::BudgetExceeded {
                states: self.states,
                seconds: self.start.elapsed().as_secs_f64(),
            });
        }
        Ok(())
    }
}

/// Exact optimum for any supported public instance.
pub fn solve_exact(inst: &PublicInstance, budget: OracleBudget) -> Result<(f64, Solution)> {
    use crate::instance::ProblemClass::*;
    Ok(match inst.class {
        Coloring => {
            let (k, colors) = exact_coloring(inst.graph()?, budget)?;
            (k as f64, Solution::Coloring(colors))
        }
        MaxSat => {
            let (sat, a) = exact_maxsat(inst.cnf()?, budget)?;
            (sat as f64, Solution::Assignment(a))
        }
        Mis => {
            let (size, set) = exact_mis(inst.graph()?, budget)?;
            (size as f64, Solution::VertexSet(set))
        }
        Mds => {
            let (size, set) = exact_mds(inst.graph()?, budget)?;
            (size as f64, Solution::VertexSet(set))
        }
        PackingLp => {
            let (v, x) = exact_lp(inst.packing()?, budget)?;
            (v, Solution::ItemFractions(x))
        }
        Mdkp => {
            let (v, picks) = exact_mdkp(inst.packing()?, budget)?;
            (v, Solution::ItemPicks(picks))
        }
        Tsp => {
            let (len, tour) = exact_tsp(inst.tsp()?, budget)?;
            (len, Solution::Tour(tour))
        }
    })
}
