use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qstate_bench::fixture;
use qstate_core::oracles::{self, CheckConfig};
use qstate_core::{
    collapsed_object_state, partial_trace, relative_state_direct, relative_state_via_pair,
    SubjectEntity,
};
use std::hint::black_box;

const SHAPES: &[&[usize]] = &[&[2, 2], &[3, 3], &[2, 3, 2], &[4, 4, 4]];

fn bench_partial_trace(c: &mut Criterion) {
    let mut group = c.benchmark_group("partial_trace");
    for dims in SHAPES {
        let f = fixture(dims, 1);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{dims:?}")),
            &f,
            |b, f| b.iter(|| partial_trace(black_box(&f.mixed), &[0]).unwrap()),
        );
    }
    group.finish();
}

fn bench_object_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("object_state");
    for dims in SHAPES {
        let f = fixture(dims, 2);
        let subject = SubjectEntity::new(f.event.clone());
        let id = format!("{dims:?}");
        group.bench_with_input(BenchmarkId::new("collapse", &id), &f, |b, f| {
            b.iter(|| collapsed_object_state(black_box(&f.mixed), &f.event, 0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("relative_direct", &id), &f, |b, f| {
            b.iter(|| relative_state_direct(black_box(&f.mixed), &subject, 0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("relative_via_pair", &id), &f, |b, f| {
            b.iter(|| relative_state_via_pair(black_box(&f.mixed), &subject, 0).unwrap())
        });
    }
    group.finish();
}

fn bench_check_suite(c: &mut Criterion) {
    let config = CheckConfig::new(100, 42);
    c.bench_function("run_all/100_trials", |b| {
        b.iter(|| oracles::run_all(black_box(&config)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_partial_trace,
    bench_object_states,
    bench_check_suite
);
criterion_main!(benches);
