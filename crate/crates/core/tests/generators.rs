use hintforge::generators::{
    benchmark_targets, generate_instance, generate_target, paper_size, payload_size, FamilySpec, SizeProfile,
    Split, SplitSpec,
};
use hintforge::instance::{Certification, ProblemClass};
use hintforge::verify::{quality, verify};

#[test]
fn paper_profile_matches_published_sizes() {
    for (class, family) in benchmark_targets() {
        let spec = FamilySpec::new(class, family, SizeProfile::Paper, 5).unwrap();
        let inst = generate_instance(&spec, Split::Test, 0).unwrap_or_else(|e| panic!("{class}/{family}: {e}"));
        assert_eq!(
            Some(payload_size(&inst.public.payload)),
            paper_size(class, family),
            "{class}/{family}"
        );
        assert_eq!(inst.evaluator.certification, Certification::Planted);
        let opt = inst.evaluator.optimum_solution.clone().unwrap();
        assert!(verify(&inst.public, &opt).unwrap());
        let s = quality(&inst, &opt).unwrap();
        assert!(s.optimal && s.quality == 1.0, "{class}/{family}");
    }
}

#[test]
fn byte_identical_across_runs() {
    let split = SplitSpec { n_train: 2, n_val: 1, n_test: 2 };
    for (class, family) in benchmark_targets() {
        let spec = FamilySpec::new(class, family, SizeProfile::Desk, 77).unwrap();
        let a = generate_target(&spec, split).unwrap();
        let b = generate_target(&spec, split).unwrap();
        let dump = |d: &hintforge::generators::TargetDataset| -> Vec<String> {
            d.train.iter().chain(&d.val).chain(&d.test).map(|i| i.to_json()).collect()
        };
        assert_eq!(dump(&a), dump(&b), "{class}/{family}");
    }
}

#[test]
fn seeds_change_instances() {
    let a = generate_instance(&FamilySpec::new(ProblemClass::Mis, "clique-path", SizeProfile::Desk, 1).unwrap(), Split::Train, 0).unwrap();
    let b = generate_instance(&FamilySpec::new(ProblemClass::Mis, "clique-path", SizeProfile::Desk, 2).unwrap(), Split::Train, 0).unwrap();
    assert_ne!(a.public, b.public);
}

#[test]
fn star_kernel_hubs_cover_their_clusters() {
    let spec = FamilySpec::new(ProblemClass::Mds, "star-kernel", SizeProfile::Paper, 3).unwrap();
    let inst = generate_instance(&spec, Split::Train, 0).unwrap();
    let g = inst.public.graph().unwrap();
    let adj = g.adjacency();
    let meta = &inst.evaluator.hidden_rule_metadata;
    let hubs: Vec<usize> = serde_json::from_value(meta["hubs"].clone()).unwrap();
    let clusters: Vec<Vec<usize>> = serde_json::from_value(meta["clusters"].clone()).unwrap();
    for (h, c) in hubs.iter().zip(&clusters) {
        let covered = c.iter().filter(|&&v| v == *h || adj[*h].binary_search(&v).is_ok()).count();
        assert!(covered as f64 >= 0.8 * c.len() as f64);
    }
}

#[test]
fn paired_ribbon_has_two_rails() {
    let spec = FamilySpec::new(ProblemClass::Tsp, "paired-ribbon", SizeProfile::Paper, 3).unwrap();
    let inst = generate_instance(&spec, Split::Train, 0).unwrap();
    let t = inst.public.tsp().unwrap();
    let mut ys: Vec<f64> = t.coords.iter().map(|c| c.1).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    assert_eq!(ys.len(), 2);
    // Indices zigzag between the rails.
    assert!(t.coords.chunks(2).all(|p| p.len() < 2 || p[0].1 != p[1].1));
}

#[test]
fn public_json_omits_evaluator_fields() {
    let spec = FamilySpec::new(ProblemClass::MaxSat, "last-clause-signal", SizeProfile::Desk, 0).unwrap();
    let inst = generate_instance(&spec, Split::Val, 1).unwrap();
    let public = inst.strip_to_public().to_json();
    for hidden in ["optimum", "hiddenRuleMetadata", "familyId", "anchors"] {
        assert!(!public.contains(hidden), "{hidden}");
    }
}
