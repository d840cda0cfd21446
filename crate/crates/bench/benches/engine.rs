use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ruqca::cyclotomic::{CyclotomicInteger, RootContext};
use ruqca::discriminant::{determinant_central, trace_matrix, TorusPresentation};
use ruqca::exchange_graph::apply_word;
use ruqca::samples;
use ruqca::weyl::WeylPresentation;

fn cyclotomic_mul(c: &mut Criterion) {
    let ctx = RootContext::new(9).unwrap();
    let a = (0..9).fold(CyclotomicInteger::from_int(&ctx, 3), |acc, k| {
        acc.add_ref(&CyclotomicInteger::zeta_power(&ctx, k).mul_ref(
            &CyclotomicInteger::from_int(&ctx, k + 2),
        ))
    });
    let b = a.mul_ref(&a);
    c.bench_function("cyclotomic multiply order 9", |bench| {
        bench.iter(|| black_box(&a).mul_ref(black_box(&b)))
    });
}

fn torus_ops(c: &mut Criterion) {
    let seed = samples::g2(5).unwrap();
    let deep = apply_word(&seed, &[0, 1, 0, 1, 0], 4).unwrap();
    let x = deep.frame()[0].clone();
    let y = deep.frame()[1].clone();
    let product = x.mul_ref(&y);
    c.bench_function("torus multiply deep octagon variables", |bench| {
        bench.iter(|| black_box(&x).mul_ref(black_box(&y)))
    });
    c.bench_function("torus fifth power", |bench| {
        bench.iter(|| black_box(&x).pow(5))
    });
    c.bench_function("torus exact left division", |bench| {
        bench.iter(|| black_box(&product).exact_left_divide(black_box(&x), 4).unwrap())
    });
}

fn discriminant_pipeline(c: &mut Criterion) {
    let seed = samples::skew_poly(3, 2).unwrap();
    let p = TorusPresentation::new(&seed, 512, 4).unwrap();
    let gram = trace_matrix(&p).unwrap();
    c.bench_function("trace matrix rank 9 skew polynomial", |bench| {
        bench.iter(|| trace_matrix(black_box(&p)).unwrap())
    });
    c.bench_function("fraction-free determinant 9 by 9", |bench| {
        bench.iter(|| determinant_central(black_box(&gram), 4).unwrap())
    });
}

fn weyl_trace(c: &mut Criterion) {
    let p = WeylPresentation::new(3, 1, None).unwrap();
    c.bench_function("weyl trace matrix order 3", |bench| {
        bench.iter(|| trace_matrix(black_box(&p)).unwrap())
    });
}

criterion_group!(
    benches,
    cyclotomic_mul,
    torus_ops,
    discriminant_pipeline,
    weyl_trace
);
criterion_main!(benches);
