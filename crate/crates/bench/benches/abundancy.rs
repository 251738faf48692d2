use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tropsa::examples::builtin;
use tropsa::linalg::{rank, RationalMatrix};
use tropsa::random::{random_mixed, rng};
use tropsa::{analyze, classify, project_onto_obstruction, SearchConfig};

fn templates(c: &mut Criterion) {
    for name in ["tuning_fork_r2", "phi3", "phi4"] {
        let curve = builtin(name).unwrap().curve;
        c.bench_function(&format!("analyze/{name}"), |b| b.iter(|| analyze(black_box(&curve))));
    }
    let cfg = SearchConfig::default();
    for name in ["phi3", "phi4"] {
        let curve = builtin(name).unwrap().curve;
        c.bench_function(&format!("classify/{name}"), |b| b.iter(|| classify(black_box(&curve), &cfg).unwrap()));
    }
    let phi4 = builtin("phi4").unwrap().curve;
    c.bench_function("project/phi4", |b| b.iter(|| project_onto_obstruction(black_box(&phi4)).unwrap()));
}

fn random_curves(c: &mut Criterion) {
    let mut g = rng(1);
    let curves: Vec<_> = (0..50).map(|_| random_mixed(&mut g)).collect();
    c.bench_function("analyze/random50", |b| {
        b.iter(|| curves.iter().map(|x| analyze(x).rank_k).sum::<usize>())
    });
}

fn rank_dense(c: &mut Criterion) {
    let n = 30;
    let entries: Vec<i64> = (0..n * n).map(|i| ((i * 7919 + 13) % 11) as i64 - 5).collect();
    let rows: Vec<Vec<i64>> = entries.chunks(n).map(|r| r.to_vec()).collect();
    let m = RationalMatrix::from_i64_rows(n, &rows);
    c.bench_function("rank/30x30", |b| b.iter(|| rank(black_box(&m))));
}

criterion_group!(benches, templates, random_curves, rank_dense);
criterion_main!(benches);
