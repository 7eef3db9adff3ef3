use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use perihom::corpus::{sweep, CorpusConfig};
use perihom::io::ComplexFile;
use perihom::monodromy::{build_monodromy_with, MonodromyOptions};
use perihom::periodic::build_window;
use perihom::persistence::analyze_filtration_with;
use perihom::toroidal::smallest_iso_n;
use perihom::{Exec, Fp};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn data(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn bench_sweep(c: &mut Criterion) {
    let mut config = CorpusConfig::parse(&data("random_default.json")).unwrap();
    config.count = 24;
    config.max_n = 3;
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep(&config, MonodromyOptions::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let f = Fp::new(2).unwrap();
    let p = ComplexFile::parse(&data("periodic_tube.json")).unwrap().build(&f).unwrap();
    let w = build_window(&p).unwrap();
    let ms = build_monodromy_with(&w, MonodromyOptions::default(), Exec::Sequential).unwrap();
    let mut group = c.benchmark_group("smallest_iso_n");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| smallest_iso_n(&p, &ms, 6, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_filtration(c: &mut Criterion) {
    let f = Fp::new(2).unwrap();
    let p = ComplexFile::parse(&data("running_filtered.json")).unwrap().build(&f).unwrap();
    let mut group = c.benchmark_group("analyze_filtration");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| analyze_filtration_with(&p, MonodromyOptions::default(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_classify, bench_filtration);
criterion_main!(benches);
