//! Structured combinatorial-optimization workbench.
//!
//! Seeded instance generators with certified optima, exact oracles, a
//! heuristic baseline pool, and three sample-based learners: runtime-aware
//! selection over a solver library, margin-based hint recovery, and Horn
//! backdoor learning for SAT with a compiled enumerate-and-solve solver.

pub mod erm;
pub mod error;
pub mod generators;
pub mod harness;
pub mod heuristics;
pub mod hint;
pub mod instance;
pub mod oracles;
pub mod rng;
pub mod sat;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{
    CnfFormula, EvaluatorData, Graph, Instance, PackingInstance, Payload, ProblemClass,
    PublicInstance, Solution, TspInstance,
};
pub use verify::{quality, verify, ScoredResult};
