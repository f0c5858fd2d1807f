use std::collections::BTreeMap;

use hintforge::erm::{choose, SolverStats};
use hintforge::generators::{generate_target, FamilySpec, SizeProfile, SplitSpec, TargetDataset};
use hintforge::heuristics::Clock;
use hintforge::instance::{Certification, EvaluatorData, Graph, Instance, Payload, ProblemClass, PublicInstance};
use hintforge::synthesis::{
    run_synthesis, score_from_logs, Action, BackdoorProposer, CatalogProposer, EvalSplit, Hypothesis, Proposal,
    ProposalContext, Proposer, SubprocessProposer, SynthesisConfig, TwoOptRefiner,
};
use hintforge::Error;
use serde_json::json;

fn fixed(r: usize, b: usize, k: usize) -> SynthesisConfig {
    SynthesisConfig {
        rounds: r,
        beam_width: b,
        budget_per_round: k,
        clock: Clock::Fixed(1.0),
        dataset_seed: 9,
        ..SynthesisConfig::default()
    }
}

fn dataset(class: ProblemClass, family: &str, n_train: usize, n_val: usize) -> TargetDataset {
    let spec = FamilySpec::new(class, family, SizeProfile::Desk, 21).unwrap();
    generate_target(&spec, SplitSpec { n_train, n_val, n_test: 2 }).unwrap()
}

fn complete_graph(n: usize) -> Instance {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Instance {
        public: PublicInstance::new(format!("k{n}"), ProblemClass::Coloring, Payload::Graph(Graph::new(n, edges).unwrap()))
            .unwrap(),
        evaluator: EvaluatorData {
            family_id: "test/complete".into(),
            hidden_rule_metadata: BTreeMap::new(),
            optimum_value: n as f64,
            optimum_solution: None,
            certification: Certification::Oracle,
        },
    }
}

struct Fixed(Vec<Proposal>);

impl Proposer for Fixed {
    fn name(&self) -> &str {
        "fixed"
    }

    fn propose(&mut self, _: Action, ctx: &ProposalContext) -> hintforge::Result<Proposal> {
        Ok(self.0[ctx.slot % self.0.len()].clone())
    }
}

fn proposal(analysis: &str, solver_id: &str, key: &str) -> Proposal {
    Proposal {
        hypothesis: Hypothesis {
            title: key.into(),
            rule_summary: String::new(),
            evidence_plan: String::new(),
            strategy: String::new(),
            failure_modes: String::new(),
            diversity_key: key.into(),
        },
        analysis_spec_id: analysis.into(),
        solver_spec_id: "catalog".into(),
        params: json!({ "solverId": solver_id }),
    }
}

#[test]
fn degenerate_loop_returns_the_single_candidate() {
    let d = dataset(ProblemClass::Mis, "clique-path", 2, 2);
    let out = run_synthesis(&mut CatalogProposer::new(ProblemClass::Mis), &d.train, &d.val, &fixed(1, 1, 1)).unwrap();
    assert_eq!(out.archive.len(), 1);
    assert_eq!(out.best.id, out.archive[0].id);
    assert_eq!(out.beams, vec![vec![out.best.id.clone()]]);
}

#[test]
fn failing_analysis_scores_zero_with_failure_runtime() {
    let d = dataset(ProblemClass::Coloring, "ring-template", 2, 2);
    let mut p = Fixed(vec![proposal("fail", "dsatur", "a"), proposal("none", "dsatur", "b")]);
    let cfg = fixed(1, 2, 2);
    let out = run_synthesis(&mut p, &d.train, &d.val, &cfg).unwrap();
    let bad = &out.archive[0];
    assert!(bad.score.failed && bad.failure.is_some());
    assert_eq!(bad.score.q_val, 0.0);
    assert_eq!(bad.score.t_val_ms, cfg.failure_runtime_ms);
    assert_eq!(out.best.id, out.archive[1].id);
}

#[test]
fn crashing_solver_zeroes_only_its_instances() {
    let d = dataset(ProblemClass::Coloring, "ring-template", 2, 4);
    let mut p = Fixed(vec![proposal("none", "crash", "a")]);
    let cfg = fixed(1, 1, 1);
    let out = run_synthesis(&mut p, &d.train, &d.val, &cfg).unwrap();
    assert!(!out.best.score.failed);
    assert_eq!(out.best.score.q_val, 0.0);
    assert!(out.best.logs.iter().all(|l| l.crashed && l.runtime_ms == cfg.failure_runtime_ms));
}

#[test]
fn scores_recompute_from_logs() {
    let d = dataset(ProblemClass::Tsp, "clustered-euclidean", 3, 3);
    let out = run_synthesis(&mut CatalogProposer::new(ProblemClass::Tsp), &d.train, &d.val, &fixed(2, 2, 3)).unwrap();
    for c in &out.archive {
        assert_eq!(score_from_logs(&c.logs), c.score, "{}", c.id);
        let val = c.logs.iter().filter(|l| l.split == EvalSplit::Val).count();
        assert_eq!(val, d.val.len());
    }
}

fn erm_cross_check(clock: Clock) {
    let train: Vec<Instance> = (3..6).map(complete_graph).collect();
    let val: Vec<Instance> = (6..10).map(complete_graph).collect();
    let mut proposer = CatalogProposer::new(ProblemClass::Coloring);
    let n = proposer.solver_ids().len();
    let cfg = SynthesisConfig {
        clock,
        ..fixed(1, n, n)
    };
    let out = run_synthesis(&mut proposer, &train, &val, &cfg).unwrap();
    let solver_of = |c: &hintforge::synthesis::EvaluatedCandidate| c.proposal.params["solverId"].as_str().unwrap().to_string();
    let stats: Vec<SolverStats> = out
        .archive
        .iter()
        .map(|c| {
            assert_eq!((c.score.q_val, c.score.o_val), (1.0, 1.0), "{}", solver_of(c));
            let val: Vec<_> = c.logs.iter().filter(|l| l.split == EvalSplit::Val).collect();
            SolverStats {
                solver_id: solver_of(c),
                empirical_err: val.iter().filter(|l| !l.feasible).count() as f64 / val.len() as f64,
                empirical_run_ms: c.score.t_val_ms,
                crashes: 0,
            }
        })
        .collect();
    assert_eq!(choose(&stats), Some(solver_of(&out.best)));
}

#[test]
fn catalog_candidates_agree_with_erm_choice() {
    erm_cross_check(Clock::Wall);
    erm_cross_check(Clock::Fixed(2.0));
}

#[test]
fn fixed_clock_run_is_byte_reproducible() {
    let d = dataset(ProblemClass::Mis, "core-fringe", 3, 3);
    let run = || {
        let out = run_synthesis(&mut CatalogProposer::new(ProblemClass::Mis), &d.train, &d.val, &fixed(3, 2, 3)).unwrap();
        serde_json::to_string(&out).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn poisoned_evaluator_metadata_changes_nothing() {
    let d = dataset(ProblemClass::Mds, "gateway-hub", 3, 3);
    let poison = |xs: &[Instance]| -> Vec<Instance> {
        xs.iter()
            .cloned()
            .map(|mut x| {
                x.evaluator.family_id = "poison".into();
                x.evaluator.hidden_rule_metadata = BTreeMap::from([("hubs".into(), json!([0, 1, 2]))]);
                x.evaluator.optimum_solution = None;
                x.evaluator.certification = Certification::Oracle;
                x
            })
            .collect()
    };
    let cfg = fixed(2, 2, 3);
    let a = run_synthesis(&mut CatalogProposer::new(ProblemClass::Mds), &d.train, &d.val, &cfg).unwrap();
    let b = run_synthesis(&mut CatalogProposer::new(ProblemClass::Mds), &poison(&d.train), &poison(&d.val), &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn archive_best_never_decreases() {
    let d = dataset(ProblemClass::Tsp, "latent-metric", 3, 3);
    let cfg = SynthesisConfig {
        clock: Clock::Wall,
        ..fixed(4, 2, 3)
    };
    let out = run_synthesis(&mut TwoOptRefiner, &d.train, &d.val, &cfg).unwrap();
    let mut prev = None;
    for r in 0..cfg.rounds {
        let best = out
            .archive
            .iter()
            .filter(|c| c.round <= r)
            .map(|c| c.score)
            .max_by(|a, b| a.rank_cmp(b))
            .unwrap();
        if let Some(p) = prev {
            assert!(best.rank_cmp(&p).is_ge());
        }
        prev = Some(best);
    }
}

#[test]
fn zero_sample_mode_still_returns_a_candidate() {
    let d = dataset(ProblemClass::MaxSat, "horn-backdoor", 0, 3);
    let out = run_synthesis(&mut BackdoorProposer::new(2, 3), &d.train, &d.val, &fixed(2, 2, 2)).unwrap();
    assert!(!out.best.score.failed);
}

#[test]
fn backdoor_proposer_recovers_planted_variables() {
    let d = dataset(ProblemClass::MaxSat, "horn-backdoor", 24, 4);
    let out = run_synthesis(&mut BackdoorProposer::new(2, 3), &d.train, &d.val, &fixed(1, 2, 1)).unwrap();
    let planted = &d.val[0].evaluator.hidden_rule_metadata["backdoor"];
    let mut learned: Vec<u64> = serde_json::from_value(out.final_summary["backdoor"].clone()).unwrap();
    learned.sort_unstable();
    assert_eq!(json!(learned), *planted);
    assert!(out.best.score.q_val > 0.95);
}

struct Flaky(usize);

impl Proposer for Flaky {
    fn name(&self) -> &str {
        "flaky"
    }

    fn propose(&mut self, _: Action, ctx: &ProposalContext) -> hintforge::Result<Proposal> {
        if ctx.round < self.0 {
            Err(Error::Evaluation("no idea".into()))
        } else {
            Ok(proposal("none", "dsatur", "k"))
        }
    }
}

#[test]
fn empty_rounds_are_logged_and_all_empty_is_an_error() {
    let d = dataset(ProblemClass::Coloring, "separator-trap", 1, 1);
    let out = run_synthesis(&mut Flaky(1), &d.train, &d.val, &fixed(2, 1, 2)).unwrap();
    assert_eq!(out.empty_rounds, vec![0]);
    assert!(matches!(
        run_synthesis(&mut Flaky(9), &d.train, &d.val, &fixed(2, 1, 2)),
        Err(Error::NoCandidate)
    ));
}

#[test]
fn overlapping_splits_rejected() {
    let d = dataset(ProblemClass::Coloring, "separator-trap", 2, 1);
    assert!(run_synthesis(&mut Flaky(0), &d.train, &d.train[..1], &fixed(1, 1, 1)).is_err());
}

#[test]
fn subprocess_proposer_speaks_ndjson() {
    let reply = serde_json::to_string(&proposal("none", "dsatur", "ext")).unwrap();
    let script = format!("while read -r line; do echo '{reply}'; done");
    let mut p = SubprocessProposer::spawn("sh", &["-c".into(), script]).unwrap();
    let d = dataset(ProblemClass::Coloring, "ring-template", 1, 1);
    let out = run_synthesis(&mut p, &d.train, &d.val, &fixed(2, 1, 2)).unwrap();
    assert_eq!(out.archive.len(), 4);
    assert_eq!(out.best.proposal.hypothesis.diversity_key, "ext");
}
