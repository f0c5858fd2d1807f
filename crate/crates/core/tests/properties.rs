use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde_json::json;

use hintforge::generators::{benchmark_targets, generate_target, FamilySpec, SizeProfile, SplitSpec};
use hintforge::harness::geometric_mean;
use hintforge::hint::{pairwise_sum, sufficient_samples};
use hintforge::instance::{relabel_graph, CnfFormula, Payload, Solution};
use hintforge::rng;
use hintforge::sat::{dpll, solve_with_backdoor};
use hintforge::synthesis::{update_beam, Action, CandidateScore, EvaluatedCandidate, Hypothesis, Proposal};
use hintforge::verify::quality;

fn candidate(id: usize, key: u8, q: u8, t: u8) -> EvaluatedCandidate {
    EvaluatedCandidate {
        id: format!("r0-c{id:03}"),
        round: 0,
        action: Action::Seed,
        parent_id: None,
        proposal: Proposal {
            hypothesis: Hypothesis {
                title: String::new(),
                rule_summary: String::new(),
                evidence_plan: String::new(),
                strategy: String::new(),
                failure_modes: String::new(),
                diversity_key: format!("k{key}"),
            },
            analysis_spec_id: "none".into(),
            solver_spec_id: "catalog".into(),
            params: json!({}),
        },
        summary: json!({}),
        score: CandidateScore {
            q_val: f64::from(q) / 4.0,
            o_val: 0.0,
            t_val_ms: f64::from(t),
            q_train: 0.0,
            o_train: 0.0,
            t_train_ms: 0.0,
            failed: false,
        },
        failure: None,
        logs: Vec::new(),
    }
}

fn random_solution(payload: &Payload, r: &mut rng::Rng) -> Solution {
    match payload {
        Payload::Graph(g) => {
            if r.gen_bool(0.5) {
                Solution::Coloring((0..g.n).map(|_| r.gen_range(0..g.n.max(1))).collect())
            } else {
                Solution::VertexSet((0..g.n).filter(|_| r.gen_bool(0.5)).collect())
            }
        }
        Payload::Cnf(f) => Solution::Assignment((0..f.num_vars).map(|_| r.gen_bool(0.5)).collect()),
        Payload::Packing(p) => {
            if r.gen_bool(0.5) {
                Solution::ItemFractions(p.values.iter().map(|_| r.gen_range(0.0..=1.0)).collect())
            } else {
                Solution::ItemPicks(p.values.iter().map(|_| r.gen_bool(0.3)).collect())
            }
        }
        Payload::Tsp(t) => {
            let mut tour: Vec<usize> = (0..t.coords.len()).collect();
            tour.shuffle(r);
            Solution::Tour(tour)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beam_ignores_archive_order(
        specs in prop::collection::vec((0u8..4, 0u8..5, 0u8..4), 1..12),
        width in 1usize..6,
        seed in any::<u64>(),
    ) {
        let archive: Vec<_> = specs.iter().enumerate().map(|(i, &(k, q, t))| candidate(i, k, q, t)).collect();
        let mut shuffled = archive.clone();
        shuffled.shuffle(&mut rng::stream(seed, &[]));
        let ids = |a: &[EvaluatedCandidate]| -> Vec<String> {
            update_beam(a, width).into_iter().map(|i| a[i].id.clone()).collect()
        };
        let beam = ids(&archive);
        prop_assert_eq!(&beam, &ids(&shuffled));
        prop_assert_eq!(beam.len(), width.min(archive.len()));
        // The overall best always survives.
        let best = archive.iter().min_by(|a, b| a.rank_cmp(b)).unwrap();
        prop_assert_eq!(&beam[0], &best.id);
    }

    #[test]
    fn quality_stays_in_unit_interval(target in 0usize..21, seed in any::<u64>()) {
        let (class, family) = benchmark_targets()[target];
        let spec = FamilySpec::new(class, family, SizeProfile::Desk, seed % 1000).unwrap();
        let d = generate_target(&spec, SplitSpec { n_train: 0, n_val: 0, n_test: 1 }).unwrap();
        let inst = &d.test[0];
        let mut r = rng::stream(seed, &[1]);
        for _ in 0..8 {
            let sol = random_solution(&inst.public.payload, &mut r);
            if let Ok(s) = quality(inst, &sol) {
                prop_assert!((0.0..=1.0).contains(&s.quality));
                prop_assert!(s.feasible || s.quality == 0.0);
                prop_assert!(!s.optimal || s.quality == 1.0);
            }
        }
    }

    #[test]
    fn backdoor_solver_matches_dpll(
        d in 1usize..10,
        raw in prop::collection::vec(prop::collection::vec((0usize..10, any::<bool>()), 1..4), 0..30),
        mask in any::<u16>(),
    ) {
        let clauses: Vec<Vec<i32>> = raw
            .iter()
            .map(|c| c.iter().map(|&(v, s)| { let v = (v % d) as i32 + 1; if s { v } else { -v } }).collect())
            .filter(|c: &Vec<i32>| !c.iter().any(|l| c.contains(&-l)))
            .collect();
        let f = CnfFormula::new(d, clauses).unwrap();
        let b: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let run = solve_with_backdoor(&f, &b).unwrap();
        prop_assert_eq!(run.result.is_sat(), dpll(&f).is_sat());
        if let Some(a) = run.assignment() {
            prop_assert!(f.is_satisfied_by(a));
        }
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers(xs in prop::collection::vec(-1000i32..1000, 0..200)) {
        let floats: Vec<f64> = xs.iter().map(|&x| f64::from(x)).collect();
        prop_assert_eq!(pairwise_sum(&floats), f64::from(xs.iter().sum::<i32>()));
    }

    #[test]
    fn sufficient_samples_is_monotone(g in 0.02f64..0.9, n in 1usize..500, delta in 0.001f64..0.5) {
        let base = sufficient_samples(g, n, delta).unwrap();
        prop_assert!(sufficient_samples(g * 1.1, n, delta).unwrap() <= base);
        prop_assert!(sufficient_samples(g, n + 1, delta).unwrap() >= base);
        prop_assert!(sufficient_samples(g, n, delta / 2.0).unwrap() >= base);
    }

    #[test]
    fn geometric_mean_of_reciprocal_pairs_is_one(xs in prop::collection::vec(1e-3f64..1e3, 1..20)) {
        let both: Vec<f64> = xs.iter().flat_map(|&x| [x, 1.0 / x]).collect();
        prop_assert!((geometric_mean(&both) - 1.0).abs() < 1e-9);
        let c = xs[0];
        prop_assert!((geometric_mean(&vec![c; xs.len()]) - c).abs() < 1e-9 * c);
    }

    #[test]
    fn relabeling_preserves_planted_optimum(target in 0usize..9, seed in any::<u64>()) {
        let graph_targets: Vec<_> = benchmark_targets().into_iter().filter(|(c, _)| c.is_graph()).collect();
        let (class, family) = graph_targets[target];
        let spec = FamilySpec::new(class, family, SizeProfile::Desk, seed % 1000).unwrap();
        let d = generate_target(&spec, SplitSpec { n_train: 0, n_val: 0, n_test: 1 }).unwrap();
        let (moved, perm) = relabel_graph(&d.test[0], seed).unwrap();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..perm.len()).collect::<Vec<_>>());
        prop_assert_eq!(moved.evaluator.optimum_value, d.test[0].evaluator.optimum_value);
        let sol = moved.evaluator.optimum_solution.clone().unwrap();
        let s = quality(&moved, &sol).unwrap();
        prop_assert!(s.feasible && s.optimal);
    }
}
