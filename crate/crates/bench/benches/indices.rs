use chordal::based_matrix::{random_extension, random_primitive};
use chordal::biquandle::{colorings, FiniteBiquandle};
use chordal::catalog::Catalog;
use chordal::indices::{all_evaluators, gaussian_ind, gaussian_n};
use chordal::moves::{enumerate_moves, BasedDiagram};
use chordal::search::{bounded_bfs, canonical_key, SearchBudget};
use chordal::verify::{full_config, fuzz_walk};
use chordal_bench::walk_diagram;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian(c: &mut Criterion) {
    let mut g = c.benchmark_group("gaussian");
    for k in [4, 8, 12] {
        let d = walk_diagram(k, 1);
        g.bench_with_input(BenchmarkId::new("n", k), &d, |b, d| b.iter(|| gaussian_n(black_box(d)).unwrap()));
        g.bench_with_input(BenchmarkId::new("Ind", k), &d, |b, d| b.iter(|| gaussian_ind(black_box(d)).unwrap()));
    }
    g.finish();
}

fn every_index(c: &mut Criterion) {
    let d = walk_diagram(8, 2);
    let evaluators = all_evaluators();
    c.bench_function("all indices, 8 crossings", |b| {
        b.iter(|| {
            for e in evaluators.iter().filter(|e| e.applies(&d)) {
                black_box(e.eval_all(&d).unwrap());
            }
        })
    });
}

fn moves_and_keys(c: &mut Criterion) {
    let d = walk_diagram(10, 3);
    c.bench_function("enumerate moves, 10 crossings", |b| b.iter(|| enumerate_moves(black_box(&d))));
    c.bench_function("canonical key, 10 crossings", |b| b.iter(|| canonical_key(black_box(&d), Some(0))));
}

fn biquandle(c: &mut Criterion) {
    let d = walk_diagram(10, 4);
    let b3 = FiniteBiquandle::dihedral(3);
    let b5 = FiniteBiquandle::linear(5, 2, 0, 3, 4);
    c.bench_function("colorings dihedral 3, 10 crossings", |b| b.iter(|| colorings(black_box(&d), &b3).unwrap()));
    c.bench_function("colorings linear 5, 10 crossings", |b| b.iter(|| colorings(black_box(&d), &b5).unwrap()));
}

fn reduction(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let core = random_primitive(&mut rng, 5, true, true);
    let ext = random_extension(&mut rng, &core, 6);
    c.bench_function("primitive reduction, 5 + 6 elements", |b| b.iter(|| black_box(&ext).reduce_primitive()));
}

fn search(c: &mut Criterion) {
    let d = Catalog::builtin().get("kink_pos").unwrap().clone();
    let from = chordal::moves::wrap(&BasedDiagram::new(d.clone(), 0).unwrap(), 2).unwrap();
    let to = BasedDiagram::new(d, 0).unwrap();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("wrap order two on a kink", |b| b.iter(|| bounded_bfs(&from, &to, SearchBudget::new(8, 10)).unwrap()));
    g.finish();
}

fn fuzz(c: &mut Criterion) {
    let d = Catalog::builtin().get("3.1").unwrap().clone();
    let cfg = full_config();
    let mut g = c.benchmark_group("fuzz");
    g.sample_size(10);
    g.bench_function("50 steps from 3.1", |b| b.iter(|| fuzz_walk(&d, 50, 1, 10, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, gaussian, every_index, moves_and_keys, biquandle, reduction, search, fuzz);
criterion_main!(benches);
