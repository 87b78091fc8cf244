use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use isoscatter_core::groups::{build_psl3, find_generating_pair, hom_from_free, sunada_check};
use isoscatter_core::zeta::{count_zeros_prepared, length_spectrum, lift_spectrum, PreparedZeta};
use isoscatter_core::{Rect, SchottkyData, ZetaTruncation};

fn spectrum(c: &mut Criterion) {
    let data = SchottkyData::four_circle_example(1.0);
    let mut g = c.benchmark_group("length_spectrum");
    for n in [4, 6, 8] {
        g.bench_function(format!("n_max={n}"), |b| {
            b.iter(|| length_spectrum(black_box(&data), n).unwrap())
        });
    }
    g.finish();
}

fn covers(c: &mut Criterion) {
    let psl = build_psl3(2).unwrap();
    let k1 = psl.stabilizer_of_point([1, 0, 0]).unwrap();
    let k2 = psl.stabilizer_of_hyperplane([1, 0, 0]).unwrap();
    c.bench_function("sunada_check psl(3,2)", |b| {
        b.iter(|| sunada_check(black_box(&k1), &k2).unwrap())
    });

    let (x, y) = find_generating_pair(psl.group()).unwrap();
    let hom = hom_from_free(psl.group().clone(), vec![x, y]).unwrap();
    let base = length_spectrum(&SchottkyData::four_circle_example(1.0), 6).unwrap();
    c.bench_function("lift_spectrum n_max=6", |b| {
        b.iter(|| lift_spectrum(black_box(&base), &hom, &k1).unwrap())
    });
}

fn zeta(c: &mut Criterion) {
    let base = length_spectrum(&SchottkyData::four_circle_example(1.0), 6).unwrap();
    let z = PreparedZeta::new(&base, ZetaTruncation::new(6, 4).unwrap());
    let s = Complex64::new(0.3, 1.7);
    c.bench_function("zeta eval", |b| b.iter(|| z.eval(black_box(s)).unwrap()));
    c.bench_function("zeta log_derivative", |b| {
        b.iter(|| z.log_derivative(black_box(s)).unwrap())
    });

    let rect = Rect::new(0.05, 0.6, 0.3, 0.9).unwrap();
    let mut g = c.benchmark_group("count_zeros");
    g.sample_size(10);
    g.bench_function("four circle", |b| {
        b.iter(|| count_zeros_prepared(black_box(&z), rect))
    });
    g.finish();
}

criterion_group!(benches, spectrum, covers, zeta);
criterion_main!(benches);
