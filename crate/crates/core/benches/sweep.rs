use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use halfmap::sweep::{linspace, sample_half_map};
use halfmap::{find_crossing_orbits, Execution, HalfMap, LienardParams, PwlSystem, SearchConfig};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn half_map_sweep(c: &mut Criterion) {
    // a weakly contracting focus: every point needs a full solve
    let map = HalfMap::new(LienardParams::new(-0.3, 1.0, 1.0).unwrap()).unwrap();
    let mut group = c.benchmark_group("half_map_sweep");
    for n in [1_000usize, 10_000] {
        let ys = linspace(0.01, 50.0, n);
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &ys, |b, ys| {
                b.iter(|| sample_half_map(&map, black_box(ys), mode))
            });
        }
    }
    group.finish();
}

fn orbit_search(c: &mut Criterion) {
    let left = LienardParams::new(0.4, 1.0, 1.0).unwrap();
    let right = LienardParams::new(-0.6, 1.5, -1.0).unwrap();
    let system = PwlSystem::new(left, right, 0.3).unwrap();
    let mut group = c.benchmark_group("orbit_search");
    for (name, mode) in MODES {
        let config = SearchConfig {
            use_certificates: false,
            execution: mode,
            ..SearchConfig::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| find_crossing_orbits(black_box(&system), &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, half_map_sweep, orbit_search);
criterion_main!(benches);
