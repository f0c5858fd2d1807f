//! Beam-search synthesis over hypothesis / analysis / solver candidates.
//!
//! Each round asks a [`Proposer`] for K proposals built from the current
//! beam. Every proposal's analysis runs once on the public training set. Its
//! solver, fed the resulting summary, is then scored on train and validation.
//! All evaluated candidates go to an archive. The next beam keeps the best
//! candidate per diversity key and fills the remaining slots by score. After
//! the last round the archive-best candidate has its analysis re-run on the
//! training set.

mod proposers;
mod subprocess;
pub mod templates;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub use proposers::{BackdoorProposer, CatalogProposer, TwoOptRefiner};
pub use subprocess::SubprocessProposer;

use crate::error::{Error, Result};
use crate::heuristics::{run_measured, Clock, DiagnosticTrace, MeasuredSolver, RunConfig, DEFAULT_CLIP_MS};
use crate::instance::{Instance, ProblemClass, PublicInstance, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hypothesis {
    pub title: String,
    pub rule_summary: String,
    pub evidence_plan: String,
    pub strategy: String,
    pub failure_modes: String,
    pub diversity_key: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Seed,
    Refine,
    Fork,
    Replace,
    PushRuntime,
    PushQuality,
}

impl Action {
    /// Actions cycled over survivors after the seeding round.
    pub const FOLLOW_UPS: [Action; 5] = [
        Action::Refine,
        Action::Fork,
        Action::PushQuality,
        Action::PushRuntime,
        Action::Replace,
    ];
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("action serializes");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::Parse(format!("unknown action `{s}`")))
    }
}

/// What a proposer returns: a hypothesis plus registered template ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Proposal {
    pub hypothesis: Hypothesis,
    pub analysis_spec_id: String,
    pub solver_spec_id: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParentContext {
    pub candidate_id: String,
    pub proposal: Proposal,
    pub summary: Value,
    pub score: CandidateScore,
    /// Public parts of up to three lowest-quality validation instances.
    pub failure_cases: Vec<PublicInstance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProposalContext {
    pub class: ProblemClass,
    pub round: usize,
    /// Position of this prompt within the round.
    pub slot: usize,
    pub parent: Option<ParentContext>,
}

pub trait Proposer {
    fn name(&self) -> &str;
    fn propose(&mut self, action: Action, ctx: &ProposalContext) -> Result<Proposal>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateScore {
    pub q_val: f64,
    pub o_val: f64,
    pub t_val_ms: f64,
    pub q_train: f64,
    pub o_train: f64,
    pub t_train_ms: f64,
    pub failed: bool,
}

impl CandidateScore {
    fn failed(failure_runtime_ms: f64) -> Self {
        CandidateScore {
            q_val: 0.0,
            o_val: 0.0,
            t_val_ms: failure_runtime_ms,
            q_train: 0.0,
            o_train: 0.0,
            t_train_ms: failure_runtime_ms,
            failed: true,
        }
    }

    /// Lexicographic (Q_val, O_val, -T_val); Greater is better.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.q_val
            .total_cmp(&other.q_val)
            .then(self.o_val.total_cmp(&other.o_val))
            .then(other.t_val_ms.total_cmp(&self.t_val_ms))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalSplit {
    Train,
    Val,
}

/// One solver call, enough to recompute the aggregate scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceLog {
    pub instance_id: String,
    pub split: EvalSplit,
    pub feasible: bool,
    pub quality: f64,
    pub optimal: bool,
    pub runtime_ms: f64,
    pub crashed: bool,
    /// sha256 of the solution's JSON; empty after a crash.
    pub solution_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluatedCandidate {
    pub id: String,
    pub round: usize,
    pub action: Action,
    pub parent_id: Option<String>,
    pub proposal: Proposal,
    pub summary: Value,
    pub score: CandidateScore,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub logs: Vec<InstanceLog>,
}

impl EvaluatedCandidate {
    /// Better-first order: score, then smaller id.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other.score.rank_cmp(&self.score).then_with(|| self.id.cmp(&other.id))
    }

    pub fn diversity_key(&self) -> &str {
        &self.proposal.hypothesis.diversity_key
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthesisConfig {
    pub rounds: usize,
    pub beam_width: usize,
    pub budget_per_round: usize,
    pub failure_runtime_ms: f64,
    pub analysis_timeout_ms: u64,
    pub clock: Clock,
    pub dataset_seed: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            rounds: 4,
            beam_width: 4,
            budget_per_round: 8,
            failure_runtime_ms: DEFAULT_CLIP_MS,
            analysis_timeout_ms: 60_000,
            clock: Clock::Wall,
            dataset_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthesisResult {
    pub best: EvaluatedCandidate,
    /// Summary from re-running the best candidate's analysis.
    pub final_summary: Value,
    pub archive: Vec<EvaluatedCandidate>,
    /// Survivor ids after each round.
    pub beams: Vec<Vec<String>>,
    pub empty_rounds: Vec<usize>,
}

impl SynthesisResult {
    /// The deployable solver: best candidate's solver bound to the final summary.
    pub fn deployed(&self, class: ProblemClass) -> Result<CandidateSolver> {
        CandidateSolver::new(&self.best.id, class, &self.best.proposal, self.final_summary.clone())
    }
}

/// A candidate's solver template bound to its summary.
pub struct CandidateSolver {
    id: String,
    class: ProblemClass,
    params: Value,
    summary: Value,
    run: templates::SolverFn,
}

impl CandidateSolver {
    pub fn new(id: &str, class: ProblemClass, p: &Proposal, summary: Value) -> Result<Self> {
        let run = templates::solver_template(&p.solver_spec_id)
            .ok_or_else(|| Error::UnknownSolver(format!("solver template `{}`", p.solver_spec_id)))?;
        Ok(CandidateSolver {
            id: id.to_string(),
            class,
            params: p.params.clone(),
            summary,
            run,
        })
    }
}

impl MeasuredSolver for CandidateSolver {
    fn id(&self) -> &str {
        &self.id
    }

    fn class(&self) -> ProblemClass {
        self.class
    }

    fn solve(&self, inst: &PublicInstance, seed: u64) -> Result<(Solution, DiagnosticTrace)> {
        (self.run)(&self.params, inst, &self.summary, seed)
    }
}

/// Runs an analysis template on a worker thread behind a panic barrier and
/// a timeout.
pub fn execute_analysis(p: &Proposal, train: &Arc<Vec<PublicInstance>>, timeout_ms: u64) -> std::result::Result<Value, String> {
    let run = templates::analysis_template(&p.analysis_spec_id)
        .ok_or_else(|| format!("unknown analysis template `{}`", p.analysis_spec_id))?;
    let (tx, rx) = mpsc::channel();
    let params = p.params.clone();
    let train = Arc::clone(train);
    std::thread::spawn(move || {
        let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&params, &train)));
        let _ = tx.send(out);
    });
    match rx.recv_timeout(Duration::from_millis(timeout_ms)) {
        Ok(Ok(Ok(v))) => Ok(v),
        Ok(Ok(Err(e))) => Err(format!("analysis error: {e}")),
        Ok(Err(_)) => Err("analysis panicked".into()),
        Err(_) => Err(format!("analysis exceeded {timeout_ms} ms")),
    }
}

fn digest(sol: &Solution) -> String {
    let bytes = serde_json::to_vec(sol).expect("solutions serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Aggregates per-instance logs of one split: (mean quality, optimality rate, mean runtime).
pub fn aggregate_logs(logs: &[InstanceLog], split: EvalSplit) -> (f64, f64, f64) {
    let mine: Vec<&InstanceLog> = logs.iter().filter(|l| l.split == split).collect();
    if mine.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = mine.len() as f64;
    (
        mine.iter().map(|l| l.quality).sum::<f64>() / n,
        mine.iter().filter(|l| l.optimal).count() as f64 / n,
        mine.iter().map(|l| l.runtime_ms).sum::<f64>() / n,
    )
}

/// Recomputes a candidate score from its logs.
pub fn score_from_logs(logs: &[InstanceLog]) -> CandidateScore {
    let (q_val, o_val, t_val_ms) = aggregate_logs(logs, EvalSplit::Val);
    let (q_train, o_train, t_train_ms) = aggregate_logs(logs, EvalSplit::Train);
    CandidateScore {
        q_val,
        o_val,
        t_val_ms,
        q_train,
        o_train,
        t_train_ms,
        failed: false,
    }
}

/// Scores a solver on an evaluation set; instance-level failures score zero
/// and are charged the failure runtime.
pub fn score_candidate(
    solver: &dyn MeasuredSolver,
    eval: &[(EvalSplit, &Instance)],
    run_cfg: &RunConfig,
) -> Result<(CandidateScore, Vec<InstanceLog>)> {
    let mut logs = Vec::with_capacity(eval.len());
    for &(split, inst) in eval {
        let m = run_measured(solver, inst, run_cfg)?;
        logs.push(InstanceLog {
            instance_id: inst.id().to_string(),
            split,
            feasible: m.scored.feasible,
            quality: m.scored.quality,
            optimal: m.scored.optimal,
            runtime_ms: m.wall_clock_ms,
            crashed: m.crashed,
            solution_digest: m.solution.as_ref().map(digest).unwrap_or_default(),
        });
    }
    Ok((score_from_logs(&logs), logs))
}

/// Two-pass beam: best per diversity key (ranked, truncated to `width`),
/// then the best remaining candidates overall. Returns archive indices.
pub fn update_beam(archive: &[EvaluatedCandidate], width: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..archive.len()).collect();
    order.sort_by(|&a, &b| archive[a].rank_cmp(&archive[b]));
    let mut keys = BTreeSet::new();
    let mut chosen = Vec::new();
    for &i in &order {
        if chosen.len() == width {
            break;
        }
        if keys.insert(archive[i].diversity_key()) {
            chosen.push(i);
        }
    }
    for &i in &order {
        if chosen.len() == width {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen.sort_by(|&a, &b| archive[a].rank_cmp(&archive[b]));
    chosen
}

fn failure_cases(c: &EvaluatedCandidate, val: &[Instance]) -> Vec<PublicInstance> {
    let by_id: BTreeMap<&str, &Instance> = val.iter().map(|i| (i.id(), i)).collect();
    let mut logs: Vec<&InstanceLog> = c.logs.iter().filter(|l| l.split == EvalSplit::Val).collect();
    logs.sort_by(|a, b| a.quality.total_cmp(&b.quality).then_with(|| a.instance_id.cmp(&b.instance_id)));
    logs.iter()
        .filter(|l| l.quality < 1.0)
        .take(3)
        .filter_map(|l| by_id.get(l.instance_id.as_str()).map(|i| i.strip_to_public()))
        .collect()
}

/// The synthesis loop. `train` and `val` must not share instance ids; test
/// instances are never an input.
pub fn run_synthesis(
    proposer: &mut dyn Proposer,
    train: &[Instance],
    val: &[Instance],
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult> {
    if cfg.rounds == 0 || cfg.beam_width == 0 || cfg.budget_per_round == 0 {
        return Err(Error::InvalidParameter("R, B and K must be at least 1".into()));
    }
    let class = val
        .first()
        .or(train.first())
        .map(Instance::class)
        .ok_or(Error::EmptyInput("train and validation sets"))?;
    if train.iter().chain(val).any(|i| i.class() != class) {
        return Err(Error::InvalidParameter("train and validation mix problem classes".into()));
    }
    let train_ids: BTreeSet<&str> = train.iter().map(Instance::id).collect();
    if let Some(dup) = val.iter().find(|i| train_ids.contains(i.id())) {
        return Err(Error::InvalidParameter(format!("instance {} is in both train and validation", dup.id())));
    }
    let train_pub: Arc<Vec<PublicInstance>> = Arc::new(train.iter().map(Instance::strip_to_public).collect());
    let eval: Vec<(EvalSplit, &Instance)> = train
        .iter()
        .map(|i| (EvalSplit::Train, i))
        .chain(val.iter().map(|i| (EvalSplit::Val, i)))
        .collect();
    let run_cfg = RunConfig {
        dataset_seed: cfg.dataset_seed,
        failure_runtime_ms: cfg.failure_runtime_ms,
        clock: cfg.clock,
    };

    let mut archive: Vec<EvaluatedCandidate> = Vec::new();
    let mut beam: Vec<usize> = Vec::new();
    let mut beams = Vec::new();
    let mut empty_rounds = Vec::new();
    for round in 0..cfg.rounds {
        // Prompts depend only on the beam from the previous round.
        let mut proposals = Vec::new();
        for slot in 0..cfg.budget_per_round {
            let (action, parent) = if beam.is_empty() {
                (Action::Seed, None)
            } else {
                let p = &archive[beam[slot % beam.len()]];
                let action = Action::FOLLOW_UPS[(slot / beam.len()) % Action::FOLLOW_UPS.len()];
                (action, Some(p))
            };
            let ctx = ProposalContext {
                class,
                round,
                slot,
                parent: parent.map(|p| ParentContext {
                    candidate_id: p.id.clone(),
                    proposal: p.proposal.clone(),
                    summary: p.summary.clone(),
                    score: p.score,
                    failure_cases: failure_cases(p, val),
                }),
            };
            match proposer.propose(action, &ctx) {
                Ok(prop) => proposals.push((slot, action, parent.map(|p| p.id.clone()), prop)),
                Err(e) => log::warn!("proposer {} failed on round {round} slot {slot}: {e}", proposer.name()),
            }
        }
        if proposals.is_empty() {
            log::warn!("round {round} produced no candidates");
            empty_rounds.push(round);
            beams.push(beam.iter().map(|&i| archive[i].id.clone()).collect());
            continue;
        }
        // Analyses run here rather than on pool workers: an analysis may use
        // the pool itself, and a worker blocked waiting on it could starve it.
        let analysed: Vec<_> = proposals
            .into_iter()
            .map(|(slot, action, parent_id, proposal)| {
                let summary = execute_analysis(&proposal, &train_pub, cfg.analysis_timeout_ms);
                (slot, action, parent_id, proposal, summary)
            })
            .collect();
        let evaluated: Vec<EvaluatedCandidate> = analysed
            .into_par_iter()
            .map(|(slot, action, parent_id, proposal, summary)| {
                let id = format!("r{round}-c{slot}");
                let failed = |why: String, summary: Value| EvaluatedCandidate {
                    id: id.clone(),
                    round,
                    action,
                    parent_id: parent_id.clone(),
                    proposal: proposal.clone(),
                    summary,
                    score: CandidateScore::failed(cfg.failure_runtime_ms),
                    failure: Some(why),
                    logs: Vec::new(),
                };
                let summary = match summary {
                    Ok(s) => s,
                    Err(why) => return Ok(failed(why, Value::Null)),
                };
                let solver = match CandidateSolver::new(&id, class, &proposal, summary.clone()) {
                    Ok(s) => s,
                    Err(e) => return Ok(failed(e.to_string(), summary)),
                };
                let (score, logs) = score_candidate(&solver, &eval, &run_cfg)?;
                Ok(EvaluatedCandidate {
                    id: id.clone(),
                    round,
                    action,
                    parent_id: parent_id.clone(),
                    proposal: proposal.clone(),
                    summary,
                    score,
                    failure: None,
                    logs,
                })
            })
            .collect::<Result<_>>()?;
        archive.extend(evaluated);
        beam = update_beam(&archive, cfg.beam_width);
        beams.push(beam.iter().map(|&i| archive[i].id.clone()).collect());
    }
    let best = archive
        .iter()
        .min_by(|a, b| a.rank_cmp(b))
        .cloned()
        .ok_or(Error::NoCandidate)?;
    let final_summary = if best.score.failed {
        best.summary.clone()
    } else {
        execute_analysis(&best.proposal, &train_pub, cfg.analysis_timeout_ms).map_err(Error::Evaluation)?
    };
    Ok(SynthesisResult {
        best,
        final_summary,
        archive,
        beams,
        empty_rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(id: &str, key: &str, q: f64, t: f64) -> EvaluatedCandidate {
        EvaluatedCandidate {
            id: id.into(),
            round: 0,
            action: Action::Seed,
            parent_id: None,
            proposal: Proposal {
                hypothesis: Hypothesis {
                    title: id.into(),
                    rule_summary: String::new(),
                    evidence_plan: String::new(),
                    strategy: String::new(),
                    failure_modes: String::new(),
                    diversity_key: key.into(),
                },
                analysis_spec_id: "none".into(),
                solver_spec_id: "catalog".into(),
                params: Value::Null,
            },
            summary: Value::Null,
            score: CandidateScore {
                q_val: q,
                o_val: 0.0,
                t_val_ms: t,
                q_train: q,
                o_train: 0.0,
                t_train_ms: t,
                failed: false,
            },
            failure: None,
            logs: vec![],
        }
    }

    fn ids(a: &[EvaluatedCandidate], sel: &[usize]) -> Vec<String> {
        sel.iter().map(|&i| a[i].id.clone()).collect()
    }

    #[test]
    fn diversity_pass_truncates() {
        let a = vec![
            cand("a", "k1", 0.9, 1.0),
            cand("b", "k1", 0.95, 1.0),
            cand("c", "k2", 0.8, 1.0),
            cand("d", "k3", 0.7, 1.0),
        ];
        assert_eq!(ids(&a, &update_beam(&a, 2)), vec!["b", "c"]);
    }

    #[test]
    fn single_key_fills_by_rank() {
        let a = vec![
            cand("a", "k", 0.5, 1.0),
            cand("b", "k", 0.9, 1.0),
            cand("c", "k", 0.9, 0.5),
            cand("d", "k", 0.1, 1.0),
        ];
        assert_eq!(ids(&a, &update_beam(&a, 3)), vec!["c", "b", "a"]);
    }

    #[test]
    fn beam_is_order_independent() {
        let mut a = vec![
            cand("a", "k1", 0.5, 1.0),
            cand("b", "k2", 0.9, 1.0),
            cand("c", "k1", 0.9, 0.5),
            cand("d", "k3", 0.9, 0.5),
        ];
        let before: BTreeSet<String> = ids(&a, &update_beam(&a, 3)).into_iter().collect();
        a.reverse();
        let after: BTreeSet<String> = ids(&a, &update_beam(&a, 3)).into_iter().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn action_names_round_trip() {
        for a in [Action::Seed, Action::PushRuntime, Action::PushQuality] {
            assert_eq!(a.to_string().parse::<Action>().unwrap(), a);
        }
        assert_eq!(Action::PushRuntime.to_string(), "push-runtime");
    }

    #[test]
    fn analysis_failures_are_caught() {
        let train = Arc::new(vec![]);
        let mut p = cand("x", "k", 0.0, 0.0).proposal;
        for (id, expect) in [("fail", "analysis error"), ("panic", "panicked"), ("missing", "unknown")] {
            p.analysis_spec_id = id.into();
            let err = execute_analysis(&p, &train, 1000).unwrap_err();
            assert!(err.contains(expect), "{err}");
        }
        p.analysis_spec_id = "sleep".into();
        p.params = serde_json::json!({ "ms": 200 });
        assert!(execute_analysis(&p, &train, 20).unwrap_err().contains("exceeded"));
    }
}
