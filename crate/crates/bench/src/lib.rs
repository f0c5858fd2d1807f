//! Shared fixtures for the criterion benches.

use hintforge::generators::{
    generate_horn_backdoor_formula, generate_target, sample_backdoor, FamilySpec, HornParams, SizeProfile, SplitSpec,
};
use hintforge::instance::{CnfFormula, Instance, ProblemClass};
use hintforge::rng;

/// Test-split instances of one desk target.
pub fn desk_instances(class: ProblemClass, family: &str, n: usize) -> Vec<Instance> {
    let spec = FamilySpec::new(class, family, SizeProfile::Desk, 1).expect("known target");
    generate_target(&spec, SplitSpec { n_train: 0, n_val: 0, n_test: n })
        .expect("desk targets certify")
        .test
}

/// Planted Horn-backdoor formulas sharing one backdoor, and that backdoor.
pub fn horn_formulas(d: usize, k: usize, m: usize, n: usize, seed: u64) -> (Vec<CnfFormula>, Vec<usize>) {
    let p = HornParams {
        num_vars: d,
        backdoor_size: k,
        num_clauses: m,
        rho: 0.5,
        horn_width: 3,
        tail_size: 1,
    };
    let b = sample_backdoor(d, k, &mut rng::stream(seed, &[0]));
    let fs = (0..n as u64)
        .map(|i| generate_horn_backdoor_formula(&p, &b, &mut rng::stream(seed, &[1, i])).expect("valid params"))
        .collect();
    (fs, b)
}
