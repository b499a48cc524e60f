use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kreinpath::path_mc::{mc_dirichlet_kernel, mc_winding_kernel};
use kreinpath::propagator::{image_sum_kernel, inverse_laplace_kernel, IMAGE_TOL};
use kreinpath::resolvent::{find_bound_states, krein_resolvent, ResolventFamily};
use kreinpath::spectral::{solve_spectrum, spectral_heat_kernel, spectrum_for_time};
use kreinpath::{Complex64, Domain, McConfig, NamedBc};

fn interval(bc: NamedBc) -> kreinpath::BoundaryUnitary {
    bc.to_unitary(Domain::UnitInterval).unwrap()
}

fn bench_resolvent(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolvent");
    for bc in [NamedBc::Periodic, NamedBc::DeltaPoint { a: -3.0 }] {
        let u = interval(bc.clone());
        group.bench_with_input(BenchmarkId::new("krein", &bc), &u, |b, u| {
            b.iter(|| krein_resolvent(u, Complex64::new(0.7, 0.2)).unwrap().value(black_box(0.3), black_box(0.8)))
        });
    }
    group.finish();
}

fn bench_images(c: &mut Criterion) {
    let mut group = c.benchmark_group("image_sum");
    for t in [0.01, 0.2, 2.0] {
        group.bench_with_input(BenchmarkId::new("pseudo", t), &t, |b, &t| {
            b.iter(|| {
                image_sum_kernel(&NamedBc::PseudoPeriodic { epsilon: 1.1 }, Domain::UnitInterval, t, black_box(0.3), 0.6, IMAGE_TOL)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    for n in [10usize, 100, 400] {
        let u = interval(NamedBc::QuasiPeriodic { alpha: 1.3 });
        group.bench_with_input(BenchmarkId::new("quasi", n), &n, |b, &n| b.iter(|| solve_spectrum(&u, n).unwrap()));
    }
    let spec = spectrum_for_time(&interval(NamedBc::DeltaPoint { a: 2.0 }), 0.05, 1e-12).unwrap();
    group.bench_function("eigensum", |b| {
        b.iter(|| spectral_heat_kernel(&spec, 0.05, black_box(0.2), 0.7, 1e-12).unwrap())
    });
    group.finish();
}

fn bench_inverse_laplace(c: &mut Criterion) {
    let family = ResolventFamily::krein(interval(NamedBc::DeltaPoint { a: -3.0 }));
    let poles = find_bound_states(&family.unitary(), 50.0).unwrap();
    c.bench_function("inverse_laplace/delta", |b| {
        b.iter(|| inverse_laplace_kernel(&family, 0.2, black_box(0.3), 0.7, &poles).unwrap())
    });
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    let cfg = McConfig::new(0.5, 0.5, 0.5).paths(20_000).steps(64);
    group.bench_function("dirichlet", |b| b.iter(|| mc_dirichlet_kernel(&cfg, Domain::UnitInterval).unwrap()));
    group.bench_function("dirichlet_serial", |b| {
        b.iter(|| mc_dirichlet_kernel(&cfg.serial(), Domain::UnitInterval).unwrap())
    });
    group.bench_function("winding", |b| b.iter(|| mc_winding_kernel(&cfg, 1.3).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_resolvent, bench_images, bench_spectrum, bench_inverse_laplace, bench_monte_carlo);
criterion_main!(benches);
