use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kreinrel::harness::checks::{check_theorem_with, DimRange, Execution};
use kreinrel::numkernel::Tolerance;

fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("check_theorem");
    g.sample_size(10);
    let dims = DimRange::new(2, 4).unwrap();
    for id in ["rrz", "IUBP2xxcor", "wie"] {
        for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            g.bench_with_input(BenchmarkId::new(name, id), &id, |b, id| {
                b.iter(|| check_theorem_with(id, 64, dims, 1, Tolerance::default(), exec).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
