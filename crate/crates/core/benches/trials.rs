use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qop_core::harness::{verify, Execution, Property, VerifyConfig};

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for property in [Property::Furuta, Property::Collapse, Property::Aluthge] {
        for (label, execution) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            let cfg = VerifyConfig { trials: 64, seed: 7, dim: 4, execution, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(property.name(), label), &cfg, |b, cfg| {
                b.iter(|| verify(property, cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
