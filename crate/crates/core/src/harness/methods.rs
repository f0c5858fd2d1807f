//! Ways of turning a target's train/validation data into one deployable solver.

use crate::erm::{select_erm, ErmConfig};
use crate::error::{Error, Result};
use crate::heuristics::{by_id, catalog, SolverRef};
use crate::instance::{Instance, ProblemClass};
use crate::synthesis::{run_synthesis, CatalogProposer, Proposer, SynthesisConfig};

/// What a method may look at. There is deliberately no test split here.
pub struct SelectionData<'a> {
    pub target: &'a str,
    pub class: ProblemClass,
    pub train: &'a [Instance],
    pub val: &'a [Instance],
}

pub trait Method {
    fn name(&self) -> &str;
    fn select(&self, data: &SelectionData<'_>) -> Result<SolverRef>;
}

/// A named catalog or special solver, no learning.
pub struct FixedSolverMethod(pub String);

impl Method for FixedSolverMethod {
    fn name(&self) -> &str {
        &self.0
    }

    fn select(&self, data: &SelectionData<'_>) -> Result<SolverRef> {
        by_id(data.class, &self.0)
    }
}

/// Runtime-aware selection over the class catalog using the training split.
pub struct ErmMethod {
    pub delta: f64,
    pub dataset_seed: u64,
}

impl Method for ErmMethod {
    fn name(&self) -> &str {
        "erm"
    }

    fn select(&self, data: &SelectionData<'_>) -> Result<SolverRef> {
        let library = catalog(data.class);
        let mut cfg = ErmConfig::for_library(&library, self.delta);
        cfg.dataset_seed = self.dataset_seed;
        let sel = select_erm(&library, data.train, &cfg)?;
        let id = sel
            .chosen_id
            .ok_or_else(|| Error::Evaluation(format!("no catalog solver is consistent on {}", data.target)))?;
        by_id(data.class, &id)
    }
}

/// Beam-search synthesis; the proposer is built fresh per target.
pub struct SynthesisMethod {
    pub name: String,
    pub config: SynthesisConfig,
    pub make_proposer: Box<dyn Fn(ProblemClass) -> Result<Box<dyn Proposer>> + Send + Sync>,
}

impl SynthesisMethod {
    pub fn catalog(config: SynthesisConfig) -> Self {
        SynthesisMethod {
            name: "synthesis-catalog".into(),
            config,
            make_proposer: Box::new(|c| Ok(Box::new(CatalogProposer::new(c)))),
        }
    }
}

impl Method for SynthesisMethod {
    fn name(&self) -> &str {
        &self.name
    }

    fn select(&self, data: &SelectionData<'_>) -> Result<SolverRef> {
        let mut p = (self.make_proposer)(data.class)?;
        let out = run_synthesis(p.as_mut(), data.train, data.val, &self.config)?;
        Ok(std::sync::Arc::new(out.deployed(data.class)?))
    }
}
