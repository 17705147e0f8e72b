use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ricci4_bench::{representative_states, warped};
use ricci4_core::flow::Integrals;
use ricci4_core::tensor::{norms, random_curvature, ricci_of, scalar_of, young_pointwise_check};
use ricci4_core::{evolve, point_data, FamilyId, FlowConfig, GeometryState, Sym2Tensor};
use std::hint::black_box;

fn curvature_algebra(c: &mut Criterion) {
    let g = Sym2Tensor::identity();
    let rm = random_curvature(7);
    c.bench_function("tensor/random_curvature", |b| {
        b.iter(|| random_curvature(black_box(11)))
    });
    c.bench_function("tensor/ricci_norms_young", |b| {
        b.iter(|| {
            let rc = ricci_of(black_box(&rm), &g).unwrap();
            let r = scalar_of(&rc, &g).unwrap();
            let n = norms(&rm, &rc, &g).unwrap();
            (n, young_pointwise_check(&rm, &rc, r, &g, 2.0).unwrap())
        })
    });
}

fn geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("catalog/integrals");
    for s in representative_states() {
        group.bench_with_input(BenchmarkId::from_parameter(s.family), &s, |b, s| {
            b.iter(|| Integrals::of_state(black_box(s)).unwrap())
        });
    }
    group.finish();
    let berger = GeometryState::homogeneous(FamilyId::BergerS3xS1, vec![8.0, 10.0, 10.0, 1.0]).unwrap();
    c.bench_function("catalog/point_data_berger", |b| {
        b.iter(|| point_data(black_box(&berger)).unwrap())
    });
}

fn flow(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow/evolve");
    group.sample_size(10);
    let s4 = GeometryState::homogeneous(FamilyId::S4, vec![100.0]).unwrap();
    let nil = GeometryState::homogeneous(FamilyId::Nil3xS1, vec![2.0, 2.0, 1.0, 1.0]).unwrap();
    let cfg = FlowConfig::with_t_end(0.5);
    group.bench_function("S4", |b| b.iter(|| evolve(black_box(&s4), &cfg).unwrap()));
    group.bench_function("Nil3xS1", |b| b.iter(|| evolve(black_box(&nil), &cfg).unwrap()));
    let short = FlowConfig {
        n_reports: 10,
        ..FlowConfig::with_t_end(0.02)
    };
    for n in [32, 64] {
        let w = warped(n);
        group.bench_with_input(BenchmarkId::new("WarpedS1xS3", n), &w, |b, w| {
            b.iter(|| evolve(black_box(w), &short).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, curvature_algebra, geometry, flow);
criterion_main!(benches);
