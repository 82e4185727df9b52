use covhess_bench::{symmetric, two_class};
use covhess_core::data::make_folds;
use covhess_core::linalg::DEFAULT_EIGEN_TOL;
use covhess_core::nn::{layer_dims_for, train, DEFAULT_HIDDEN};
use covhess_core::{covariance, cross_validate, fisher_matrix, sym_eigen, CvConfig, MlpModel, TrainConfig, VarianceBias};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("sym_eigen");
    for d in [10, 30, 50] {
        let a = symmetric(d, d as u64);
        g.bench_with_input(BenchmarkId::from_parameter(d), &a, |b, a| b.iter(|| sym_eigen(black_box(a), DEFAULT_EIGEN_TOL)));
    }
    g.finish();
}

fn cov(c: &mut Criterion) {
    let ds = two_class(569, 30, 1);
    c.bench_function("covariance_569x30", |b| b.iter(|| covariance(black_box(&ds.features), VarianceBias::Population)));
}

fn fisher(c: &mut Criterion) {
    let ds = two_class(569, 30, 2);
    let model = MlpModel::new(&layer_dims_for(30, &DEFAULT_HIDDEN), 0).unwrap();
    c.bench_function("fisher_569x30", |b| b.iter(|| fisher_matrix(&model, black_box(&ds.features), &ds.labels)));
}

fn training(c: &mut Criterion) {
    let ds = two_class(569, 30, 3);
    let init = MlpModel::new(&layer_dims_for(30, &DEFAULT_HIDDEN), 0).unwrap();
    let tc = TrainConfig { epochs: 5, ..TrainConfig::default() };
    c.bench_function("train_5_epochs_569x30", |b| b.iter(|| train(&init, black_box(&ds), &tc)));
}

fn small_cv(c: &mut Criterion) {
    let ds = two_class(200, 10, 4);
    let plan = make_folds(&ds, 5, true, 0).unwrap();
    let cfg = CvConfig { train: TrainConfig { epochs: 5, ..TrainConfig::default() }, ..CvConfig::default() };
    let mut g = c.benchmark_group("cross_validate");
    g.sample_size(10);
    g.bench_function("5fold_200x10", |b| b.iter(|| cross_validate(black_box(&ds), &plan, &cfg)));
    g.finish();
}

criterion_group!(benches, eigen, cov, fisher, training, small_cv);
criterion_main!(benches);
