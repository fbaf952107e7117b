use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use ymlattice_core::calculus::{coboundary, cup, star};
use ymlattice_core::gauge::{gauge_transform, ym_residual_norm};
use ymlattice_core::solver::action_gradient;
use ymlattice_core::{curvature, random_connection, random_form, random_gauge, CopyFlag, Domain};

fn domains() -> Vec<(&'static str, Domain)> {
    vec![
        ("sphere_2", Domain::sphere([2, 2, 2, 2]).unwrap()),
        ("sphere_4", Domain::sphere([4, 4, 4, 4]).unwrap()),
        ("block_6", Domain::block([6, 6, 6, 6]).unwrap()),
    ]
}

fn operators(c: &mut Criterion) {
    let mut g = c.benchmark_group("operators");
    for (name, d) in domains() {
        let one = random_form(d, 1, CopyFlag::Base, 1).unwrap();
        let two = random_form(d, 2, CopyFlag::Base, 2).unwrap();
        g.bench_with_input(BenchmarkId::new("coboundary_2form", name), &two, |b, f| {
            b.iter(|| coboundary(black_box(f)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("cup_1x2", name), &(one, two.clone()), |b, (f, h)| {
            b.iter(|| cup(black_box(f), black_box(h)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("star_2form", name), &two, |b, f| {
            b.iter(|| star(black_box(f)))
        });
    }
    g.finish();
}

fn field(c: &mut Criterion) {
    let mut g = c.benchmark_group("field");
    for (name, d) in domains() {
        let a = random_connection(d, 0.5, 3).unwrap();
        let h = random_gauge(d, 4);
        g.bench_with_input(BenchmarkId::new("curvature", name), &a, |b, a| {
            b.iter(|| curvature(black_box(a)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("ym_residual_norm", name), &a, |b, a| {
            b.iter(|| ym_residual_norm(black_box(a)).unwrap())
        });
        g.bench_with_input(
            BenchmarkId::new("gauge_transform", name),
            &(a.clone(), h),
            |b, (a, h)| b.iter(|| gauge_transform(black_box(a), black_box(h)).unwrap()),
        );
        g.bench_with_input(BenchmarkId::new("action_gradient", name), &a, |b, a| {
            b.iter(|| action_gradient(black_box(a)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, operators, field);
criterion_main!(benches);
