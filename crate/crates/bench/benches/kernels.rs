use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use twilled::algebra::{LinearOp, Role};
use twilled::catalog;
use twilled::cochain::{comp_i, g_bracket};
use twilled::io::proto_from_algebra;
use twilled::rational::int;
use twilled::twisting::{twist_closed_form, twist_series};
use twilled::Cochain;

// Deterministic, moderately dense entries in -2..=2.
fn filled(dim: usize, arity: usize) -> Cochain {
    Cochain::from_fn(dim, arity, |out, ins| {
        let h = ins.iter().fold(out * 7 + 3, |acc, &i| acc * 31 + i * 5 + 1);
        int((h % 5) as i64 - 2)
    })
    .unwrap()
}

fn composition(c: &mut Criterion) {
    let mut group = c.benchmark_group("comp_i");
    for dim in [2, 4, 6] {
        let (f, g) = (filled(dim, 2), filled(dim, 2));
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| comp_i(black_box(&f), black_box(&g), 2).unwrap())
        });
    }
    group.finish();
}

fn bracket(c: &mut Criterion) {
    let mut group = c.benchmark_group("g_bracket");
    for (dim, m, n) in [(4, 2, 2), (4, 2, 3), (6, 2, 2)] {
        let (f, g) = (filled(dim, m), filled(dim, n));
        group.bench_function(format!("d{dim}_{m}x{n}"), |b| {
            b.iter(|| g_bracket(black_box(&f), black_box(&g)).unwrap())
        });
    }
    group.finish();
}

fn twisting(c: &mut Criterion) {
    let mut group = c.benchmark_group("twist");
    group.sample_size(20);
    for n in [4, 6] {
        let alg = catalog::double(&catalog::truncated_poly(n), &int(1), &int(0));
        let ps = proto_from_algebra(&alg, None).unwrap();
        let h = catalog::integral(n, Role::A2, Role::A1);
        group.bench_function(format!("series_n{n}"), |b| {
            b.iter(|| twist_series(black_box(&ps), &h).unwrap())
        });
        group.bench_function(format!("closed_n{n}"), |b| {
            b.iter(|| twist_closed_form(black_box(&ps), &h).unwrap())
        });
    }
    // A dense map exercises every term of the series.
    let alg = catalog::double(&catalog::full_matrices(), &int(1), &int(1));
    let ps = proto_from_algebra(&alg, None).unwrap();
    let h = LinearOp::from_fn(4, 4, Role::A2, Role::A1, |r, c| int(((r * 3 + c) % 3) as i64 - 1));
    group.bench_function("series_m2_dense", |b| {
        b.iter(|| twist_series(black_box(&ps), &h).unwrap())
    });
    group.finish();
}

criterion_group!(kernels, composition, bracket, twisting);
criterion_main!(kernels);
