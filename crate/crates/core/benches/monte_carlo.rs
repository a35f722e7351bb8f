use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use spinglass::amp::{run_bayes_amp, sample_instance};
use spinglass::numerics::RngStream;
use spinglass::oracle::guerra_rs_bound_mc;
use spinglass::oracle::pd_second_moment_mc;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let seq = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let par = ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", seq), ("parallel", par)]
}

fn guerra(c: &mut Criterion) {
    let mut g = c.benchmark_group("guerra_n12");
    g.sample_size(10);
    let rng = RngStream::from_seed(1);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| guerra_rs_bound_mc(12, 2.0, 16, &rng).unwrap()))
        });
    }
    g.finish();
}

fn pd_moment(c: &mut Criterion) {
    let mut g = c.benchmark_group("pd_second_moment");
    g.sample_size(10);
    let rng = RngStream::from_seed(2);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| pd_second_moment_mc(0.5, 2000, 200, &rng).unwrap()))
        });
    }
    g.finish();
}

fn amp(c: &mut Criterion) {
    let mut g = c.benchmark_group("bayes_amp_n1000");
    g.sample_size(10);
    let rng = RngStream::from_seed(3);
    let inst = sample_instance(1000, 1.5, &rng).unwrap();
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| run_bayes_amp(&inst, 0.3, 10, &rng.substream(1)).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, guerra, pd_moment, amp);
criterion_main!(benches);
