use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use measched::cover::build_cover_for;
use measched::{plane_prime, Mapping, Schedule, Universe};
use measched_bench::{EMIT_SIZES, SIZES};

fn cover(c: &mut Criterion) {
    let mut group = c.benchmark_group("cover");
    for n in SIZES {
        let prime = plane_prime(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_cover_for(n, prime))
        });
    }
    group.finish();
}

fn universe(c: &mut Criterion) {
    let mut group = c.benchmark_group("universe");
    for n in SIZES {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| Universe::build(n).unwrap())
        });
    }
    group.finish();
}

fn schedule(c: &mut Criterion) {
    let mut group = c.benchmark_group("schedule");
    group.sample_size(10);
    for mapping in Mapping::ALL {
        for n in EMIT_SIZES {
            let u = Universe::build(n).unwrap();
            group.bench_with_input(BenchmarkId::new(mapping.name(), n), &u, |b, u| {
                b.iter(|| Schedule::from_universe(u, mapping).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, cover, universe, schedule);
criterion_main!(benches);
