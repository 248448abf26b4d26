use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sepdec::campaign::{fuzz, FuzzConfig};
use sepdec::{decompose, enumerate_gauge, gen_ppt, Execution, Kind, Tolerances};

fn campaign_sequential_vs_parallel(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("fuzz_campaign");
    group.sample_size(10);
    for n_max in [4, 6, 8] {
        let cfg = FuzzConfig {
            n_min: 2,
            n_max,
            seeds: (0..20).collect(),
            kinds: vec![Kind::Ppt, Kind::Random, Kind::Perturbed],
        };
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n_max), &cfg, |b, cfg| {
                b.iter(|| fuzz(cfg, &tol, exec))
            });
        }
    }
    group.finish();
}

fn gauge_sweep(c: &mut Criterion) {
    let tol = Tolerances::default();
    let params = gen_ppt(10, 1);
    let constants: Vec<f64> = (0..32).map(|i| i as f64 * 0.1).collect();
    let mut group = c.benchmark_group("gauge_sweep_n10");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| enumerate_gauge(&params, &constants, &tol, exec).unwrap())
        });
    }
    group.finish();
}

fn single_decomposition(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("decompose");
    for n in [4, 8, 12] {
        let params = gen_ppt(n, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &params, |b, p| {
            b.iter(|| decompose(p, 0.0, &tol).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, campaign_sequential_vs_parallel, gauge_sweep, single_decomposition);
criterion_main!(benches);
