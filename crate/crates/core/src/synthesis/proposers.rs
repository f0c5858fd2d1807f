//! Deterministic stub proposers.

use serde_json::{json, Value};

use super::{Action, Hypothesis, Proposal, ProposalContext, Proposer};
use crate::error::{Error, Result};
use crate::heuristics::{catalog, TWO_OPT_MAX_PASSES, TWO_OPT_STARTS};
use crate::instance::ProblemClass;

fn hypothesis(title: String, rule: &str, strategy: &str, key: String) -> Hypothesis {
    Hypothesis {
        title,
        rule_summary: rule.into(),
        evidence_plan: "compare validation quality, optimality and runtime".into(),
        strategy: strategy.into(),
        failure_modes: "none known".into(),
        diversity_key: key,
    }
}

fn catalog_proposal(solver_id: &str) -> Proposal {
    Proposal {
        hypothesis: hypothesis(
            format!("baseline {solver_id}"),
            "no exploitable structure assumed",
            "run a fixed catalog heuristic",
            solver_id.to_string(),
        ),
        analysis_spec_id: "none".into(),
        solver_spec_id: "catalog".into(),
        params: json!({ "solverId": solver_id }),
    }
}

fn parent_param<'a>(ctx: &'a ProposalContext, key: &str) -> Option<&'a Value> {
    ctx.parent.as_ref().and_then(|p| p.proposal.params.get(key))
}

/// Emits the heuristic catalog of the class. Seed and fork prompts walk
/// through solvers not yet proposed; the other actions re-propose the
/// parent, or the next solver once the catalog is exhausted.
pub struct CatalogProposer {
    ids: Vec<String>,
    next: usize,
}

impl CatalogProposer {
    pub fn new(class: ProblemClass) -> Self {
        CatalogProposer {
            ids: catalog(class).iter().map(|s| s.id().to_string()).collect(),
            next: 0,
        }
    }

    pub fn solver_ids(&self) -> &[String] {
        &self.ids
    }

    fn take_next(&mut self) -> String {
        let id = self.ids[self.next % self.ids.len()].clone();
        self.next += 1;
        id
    }
}

impl Proposer for CatalogProposer {
    fn name(&self) -> &str {
        "catalog"
    }

    fn propose(&mut self, action: Action, ctx: &ProposalContext) -> Result<Proposal> {
        if self.ids.is_empty() {
            return Err(Error::EmptyInput("heuristic catalog"));
        }
        let fresh = self.next < self.ids.len();
        let id = match (action, parent_param(ctx, "solverId").and_then(Value::as_str)) {
            (Action::Seed | Action::Fork | Action::Replace, _) => self.take_next(),
            (_, Some(parent)) if !fresh => parent.to_string(),
            _ => self.take_next(),
        };
        Ok(catalog_proposal(&id))
    }
}

/// Learns a Horn backdoor from training formulas and deploys the compiled
/// backdoor solver. Refine grows the backdoor, push-runtime shrinks it,
/// fork and replace fall back to catalog heuristics.
pub struct BackdoorProposer {
    pub initial_k: usize,
    pub max_k: usize,
    fallback: CatalogProposer,
}

impl BackdoorProposer {
    pub fn new(initial_k: usize, max_k: usize) -> Self {
        BackdoorProposer {
            initial_k,
            max_k,
            fallback: CatalogProposer::new(ProblemClass::MaxSat),
        }
    }

    fn proposal(k: usize) -> Proposal {
        Proposal {
            hypothesis: hypothesis(
                format!("horn backdoor of size {k}"),
                "a few variables occur positively in most non-Horn clauses",
                "fix the top-salience variables, solve the Horn residual",
                format!("backdoor-{k}"),
            ),
            analysis_spec_id: "backdoor-salience".into(),
            solver_spec_id: "backdoor".into(),
            params: json!({ "k": k }),
        }
    }
}

impl Proposer for BackdoorProposer {
    fn name(&self) -> &str {
        "backdoor"
    }

    fn propose(&mut self, action: Action, ctx: &ProposalContext) -> Result<Proposal> {
        if ctx.class != ProblemClass::MaxSat {
            return Err(Error::UnsupportedClass(ctx.class));
        }
        let parent_k = parent_param(ctx, "k").and_then(Value::as_u64).map(|k| k as usize);
        let k = match (action, parent_k) {
            (Action::Seed, _) => (self.initial_k + ctx.slot).min(self.max_k),
            (Action::Fork | Action::Replace, _) | (_, None) => return self.fallback.propose(action, ctx),
            (Action::PushRuntime, Some(k)) => k.saturating_sub(1),
            (Action::Refine | Action::PushQuality, Some(k)) => (k + 1).min(self.max_k),
        };
        Ok(Self::proposal(k))
    }
}

/// Mutates 2-opt starts and pass budgets.
#[derive(Default)]
pub struct TwoOptRefiner;

impl TwoOptRefiner {
    const STARTS: [&'static str; 3] = ["nearest-neighbor", "farthest-insertion", "random"];

    fn proposal(start: &str, starts: usize, passes: usize) -> Proposal {
        Proposal {
            hypothesis: hypothesis(
                format!("2-opt from {start}, {starts} starts, {passes} passes"),
                "short tours are reachable by local edge exchanges",
                "construct a tour, then improve it with 2-opt",
                format!("two-opt-{start}"),
            ),
            analysis_spec_id: "size-profile".into(),
            solver_spec_id: "two-opt".into(),
            params: json!({ "start": start, "starts": starts, "maxPasses": passes }),
        }
    }
}

impl Proposer for TwoOptRefiner {
    fn name(&self) -> &str {
        "two-opt-refiner"
    }

    fn propose(&mut self, action: Action, ctx: &ProposalContext) -> Result<Proposal> {
        if ctx.class != ProblemClass::Tsp {
            return Err(Error::UnsupportedClass(ctx.class));
        }
        let get = |key: &str, default: usize| {
            parent_param(ctx, key).and_then(Value::as_u64).map_or(default, |v| v as usize)
        };
        let start = parent_param(ctx, "start").and_then(Value::as_str).unwrap_or("random");
        let starts = get("starts", TWO_OPT_STARTS);
        let passes = get("maxPasses", TWO_OPT_MAX_PASSES);
        let at = Self::STARTS.iter().position(|s| *s == start).unwrap_or(2);
        Ok(match action {
            Action::Seed => {
                Self::proposal(Self::STARTS[ctx.slot % 3], TWO_OPT_STARTS >> (ctx.slot / 3).min(3), TWO_OPT_MAX_PASSES)
            }
            Action::Refine => Self::proposal(start, starts, passes * 2),
            Action::PushQuality => Self::proposal(start, (starts * 2).min(64), passes),
            Action::PushRuntime => Self::proposal(start, (starts / 2).max(1), (passes / 2).max(1)),
            Action::Fork => Self::proposal(Self::STARTS[(at + 1) % 3], starts, passes),
            Action::Replace => Self::proposal(Self::STARTS[(at + 2) % 3], TWO_OPT_STARTS, TWO_OPT_MAX_PASSES),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(class: ProblemClass, slot: usize) -> ProposalContext {
        ProposalContext {
            class,
            round: 0,
            slot,
            parent: None,
        }
    }

    #[test]
    fn catalog_walks_every_solver_once_first() {
        let mut p = CatalogProposer::new(ProblemClass::Coloring);
        let n = p.solver_ids().len();
        let ids: Vec<Value> = (0..n)
            .map(|s| p.propose(Action::Seed, &ctx(ProblemClass::Coloring, s)).unwrap().params["solverId"].clone())
            .collect();
        let mut sorted = ids.clone();
        sorted.sort_by_key(|v| v.to_string());
        sorted.dedup();
        assert_eq!(sorted.len(), n);
    }

    #[test]
    fn wrong_class_rejected() {
        assert!(BackdoorProposer::new(2, 4).propose(Action::Seed, &ctx(ProblemClass::Tsp, 0)).is_err());
        assert!(TwoOptRefiner.propose(Action::Seed, &ctx(ProblemClass::Mis, 0)).is_err());
    }
}
