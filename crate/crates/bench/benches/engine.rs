use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use subtori_bench::{diagonal, gauss_cube, mixed, moser, sqrt2};
use subtori_core::field::fields::sqrt2_i;
use subtori_core::{census, closure, endomorphism_algebra};

fn field_ops(c: &mut Criterion) {
    let k = sqrt2_i();
    let a = k.add(&sqrt2(&k), &k.from_int(3));
    let b = k.add(&k.theta(), &k.i());
    c.bench_function("field_mul", |bch| bch.iter(|| k.mul(black_box(&a), black_box(&b))));
    c.bench_function("field_inv", |bch| bch.iter(|| k.inv(black_box(&a))));
}

fn engine(c: &mut Criterion) {
    let m = mixed();
    let v = diagonal(&m);
    c.bench_function("closure_mixed_diagonal", |b| b.iter(|| closure(black_box(&m), black_box(&v))));
    let t = moser();
    c.bench_function("census_moser_height_2", |b| b.iter(|| census(black_box(&t), 2)));
    c.bench_function("endomorphism_algebra_mixed", |b| b.iter(|| endomorphism_algebra(black_box(&m))));
    let cube = gauss_cube();
    c.bench_function("endomorphism_algebra_gauss_cube", |b| b.iter(|| endomorphism_algebra(black_box(&cube))));
}

criterion_group!(benches, field_ops, engine);
criterion_main!(benches);
