use addcomb::experiments::{enumerate_pairs, PairSpec, DEFAULT_BUDGET};
use addcomb::oracles::pollard_sweep;
use addcomb::{Exec, GroupCtx};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn modes() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Exec::Parallel));
    }
    v
}

fn pollard(c: &mut Criterion) {
    let mut grp = c.benchmark_group("pollard_sweep_z8");
    grp.sample_size(10);
    for (name, exec) in modes() {
        grp.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| pollard_sweep(GroupCtx::integers(), black_box(8), 8, exec))
        });
    }
    grp.finish();
}

fn enumerate(c: &mut Criterion) {
    let spec = PairSpec::new(GroupCtx::integers(), 24, 4, 4, 12).unwrap();
    let mut grp = c.benchmark_group("enumerate_pairs_n24_s4");
    grp.sample_size(10);
    for (name, exec) in modes() {
        grp.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| enumerate_pairs(black_box(&spec), DEFAULT_BUDGET, exec).unwrap())
        });
    }
    grp.finish();
}

criterion_group!(benches, pollard, enumerate);
criterion_main!(benches);
