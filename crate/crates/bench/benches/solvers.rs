use criterion::{criterion_group, criterion_main, Criterion};
use hintforge::generators::benchmark_targets;
use hintforge::heuristics::{catalog, MeasuredSolver};
use hintforge_bench::desk_instances;
use std::hint::black_box;

fn catalog_on_desk_targets(c: &mut Criterion) {
    for (class, family) in benchmark_targets() {
        let insts = desk_instances(class, family, 4);
        let mut g = c.benchmark_group(format!("{class}/{family}"));
        g.sample_size(10);
        for s in catalog(class) {
            g.bench_function(s.id(), |b| {
                b.iter(|| {
                    for i in &insts {
                        black_box(s.solve(&i.public, 7).ok());
                    }
                })
            });
        }
        g.finish();
    }
}

criterion_group!(benches, catalog_on_desk_targets);
criterion_main!(benches);
