use criterion::{criterion_group, criterion_main, Criterion};
use hintforge::sat::{dpll, estimate_salience, solve_with_backdoor};
use hintforge_bench::horn_formulas;
use std::hint::black_box;

fn backdoor_vs_dpll(c: &mut Criterion) {
    let (fs, b) = horn_formulas(40, 3, 240, 8, 11);
    let mut g = c.benchmark_group("horn-backdoor-d40-k3");
    g.sample_size(10);
    g.bench_function("compiled-backdoor", |bench| {
        bench.iter(|| fs.iter().for_each(|f| { black_box(solve_with_backdoor(f, &b).unwrap()); }))
    });
    g.bench_function("dpll", |bench| bench.iter(|| fs.iter().for_each(|f| { black_box(dpll(f)); })));
    g.finish();

    let (train, _) = horn_formulas(12, 2, 48, 1235, 3);
    c.bench_function("salience-d12-m1235", |bench| bench.iter(|| black_box(estimate_salience(&train).unwrap())));
}

criterion_group!(benches, backdoor_vs_dpll);
criterion_main!(benches);
