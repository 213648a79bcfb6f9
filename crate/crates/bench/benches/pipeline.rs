use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use pblocks_core::blocks::tau_from_cartan;
use pblocks_core::field::Field;
use pblocks_core::harness::{run_group_analysis, Corpus};
use pblocks_core::mat::Mat;

fn field_mul(c: &mut Criterion) {
    for (p, m) in [(2, 8), (3, 4), (2, 20)] {
        let f = Field::new(p, m).unwrap();
        let g = f.primitive();
        c.bench_function(&format!("mul GF({p}^{m})"), |b| {
            b.iter(|| {
                let mut x = f.one();
                for _ in 0..1000 {
                    x = f.mul(x, g);
                }
                black_box(x)
            })
        });
    }
}

fn mat_rank(c: &mut Criterion) {
    let f = Arc::new(Field::new(2, 4).unwrap());
    let n = 64;
    let m = Mat::from_fn(&f, n, n, |i, j| f.from_encoding(((i * 7 + j * 13 + i * j) % 16) as u32));
    c.bench_function("rank 64x64 GF(16)", |b| b.iter(|| black_box(m.rank())));
}

fn analysis(c: &mut Criterion) {
    let corpus = Corpus::default_corpus();
    let mut g = c.benchmark_group("analysis");
    g.sample_size(10);
    for (name, p) in [("A4", 2), ("A5", 2), ("S5", 3), ("SL(2,8)", 2)] {
        let group = corpus.entry(name).unwrap().group().unwrap();
        g.bench_function(format!("{name} p={p}"), |b| {
            b.iter(|| black_box(run_group_analysis(name, &group, p, 0).unwrap()))
        });
    }
    g.finish();
}

fn tau(c: &mut Criterion) {
    let cartan = vec![
        vec![8, 4, 4, 4, 4],
        vec![4, 4, 3, 3, 1],
        vec![4, 3, 4, 2, 2],
        vec![4, 3, 2, 4, 2],
        vec![4, 1, 2, 2, 4],
    ];
    let d = [1, 20, 56, 76, 120];
    c.bench_function("tau 5x5", |b| b.iter(|| black_box(tau_from_cartan(&cartan, &d).unwrap())));
}

criterion_group!(benches, field_mul, mat_rank, analysis, tau);
criterion_main!(benches);
