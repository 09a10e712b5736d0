use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualrank_bench::charts;
use dualrank_core::duality::{gh_singularity_test, refined_dual_defect, DualityConfig, GhMode};
use dualrank_core::gauss::analyze_at;
use dualrank_core::numerics::RankPolicy;
use dualrank_core::report::{cmd_table, RunConfig};
use dualrank_core::rng::stream;

fn jets(c: &mut Criterion) {
    let mut group = c.benchmark_group("jet");
    for chart in charts() {
        let u = chart.sample_point(&mut stream(1, 0)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(chart.name()), &u, |b, u| {
            b.iter(|| chart.jet(u).unwrap())
        });
    }
    group.finish();
}

fn gh_test(c: &mut Criterion) {
    let policy = RankPolicy::default();
    let mut group = c.benchmark_group("gh");
    for chart in charts() {
        let u = chart.sample_point(&mut stream(2, 0)).unwrap();
        let a = analyze_at(&chart, &u, &policy).unwrap();
        for mode in [GhMode::Probabilistic, GhMode::Interpolated] {
            let id = BenchmarkId::new(mode.to_string(), chart.name());
            group.bench_function(id, |b| {
                b.iter(|| gh_singularity_test(&a.sff, mode, &mut stream(3, 0)).unwrap())
            });
        }
    }
    group.finish();
}

fn dual_defect(c: &mut Criterion) {
    let mut group = c.benchmark_group("dual_defect");
    let serial = DualityConfig {
        parallel: false,
        ..DualityConfig::default()
    };
    for chart in charts() {
        group.bench_function(chart.name(), |b| {
            b.iter(|| refined_dual_defect(&chart, &serial).unwrap())
        });
    }
    group.finish();
}

fn table(c: &mut Criterion) {
    let serial = RunConfig {
        parallel: false,
        ..RunConfig::default()
    };
    c.bench_function("table/serial", |b| b.iter(|| cmd_table(&serial).unwrap()));
    c.bench_function("table/parallel", |b| {
        b.iter(|| cmd_table(&RunConfig::default()).unwrap())
    });
}

criterion_group!(benches, jets, gh_test, dual_defect, table);
criterion_main!(benches);
