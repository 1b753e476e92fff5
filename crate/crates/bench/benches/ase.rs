use ase_bench::imbalanced;
use ase_core::anomaly::{IsolationForest, IsolationForestParams};
use ase_core::ensemble::{train_ase, AseConfig, Scorer};
use ase_core::learners::DecisionTree;
use ase_core::metrics::roc_auc;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn iforest(c: &mut Criterion) {
    let ds = imbalanced(4000, 25, 11, 1);
    c.bench_function("iforest_fit_4000x11", |b| {
        b.iter(|| IsolationForest::fit(black_box(&ds), IsolationForestParams::default(), 7).unwrap())
    });
    let forest = IsolationForest::fit(&ds, IsolationForestParams::default(), 7).unwrap();
    c.bench_function("iforest_score_row", |b| {
        b.iter(|| forest.score(black_box(ds.row(17))).unwrap())
    });
}

fn tree(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_fit_depth10");
    for n in [500usize, 2000] {
        let ds = imbalanced(n, 2, 11, 2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &ds, |b, ds| {
            b.iter(|| DecisionTree::fit(black_box(ds), 10).unwrap())
        });
    }
    group.finish();
}

fn ensemble(c: &mut Criterion) {
    let ds = imbalanced(3900, 26, 11, 3);
    let mut group = c.benchmark_group("train_ase");
    group.sample_size(10);
    for members in [10usize, 50] {
        let cfg = AseConfig {
            members,
            ..AseConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(members), &cfg, |b, cfg| {
            b.iter(|| train_ase(black_box(&ds), cfg).unwrap())
        });
    }
    group.finish();

    let model = train_ase(&ds, &AseConfig::default()).unwrap();
    c.bench_function("ase_score_dataset_50", |b| {
        b.iter(|| model.score_dataset(black_box(&ds)).unwrap())
    });
}

fn auc(c: &mut Criterion) {
    let ds = imbalanced(10_000, 20, 1, 4);
    let scores: Vec<f64> = ds.rows().map(|r| r[0]).collect();
    c.bench_function("roc_auc_10500", |b| {
        b.iter(|| roc_auc(black_box(&scores), ds.labels()).unwrap())
    });
}

criterion_group!(benches, iforest, tree, ensemble, auc);
criterion_main!(benches);
