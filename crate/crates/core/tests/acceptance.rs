//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use kreinpath::bc::{satisfies_bc, Domain, NamedBc};
use kreinpath::path_mc::{mc_dirichlet_kernel, mc_neumann_kernel, mc_winding_kernel, McConfig, McEstimate};
use kreinpath::propagator::{
    forward_laplace_check, free_kernel, image_sum_kernel, inverse_laplace_kernel, HeatKernel, ImageSumKernel,
    SpectralKernel, IMAGE_TOL,
};
use kreinpath::resolvent::{
    closed_form_resolvent, find_bound_states, find_bound_states_named, krein_resolvent, ResolventFamily,
};
use kreinpath::spectral::{solve_spectrum, spectral_heat_kernel, spectrum_for_time};
use kreinpath::quadrature::kronrod_composite;
use kreinpath::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// ---------------------------------------------------------------- 1

fn krein_matches_closed_forms() -> Check {
    let mut cases: Vec<(NamedBc, Domain)> = vec![];
    for d in [Domain::HalfLine, Domain::UnitInterval] {
        cases.push((NamedBc::Neumann, d));
        cases.push((NamedBc::Dirichlet, d));
    }
    for alpha in [-2.0, -0.7, 0.4, 1.5, 2.9] {
        cases.push((NamedBc::RobinHalfLine { alpha }, Domain::HalfLine));
    }
    cases.push((NamedBc::Periodic, Domain::UnitInterval));
    for epsilon in [0.3, 1.0, 2.0, PI, -1.4] {
        cases.push((NamedBc::PseudoPeriodic { epsilon }, Domain::UnitInterval));
    }
    let zs = [c(0.5, 0.0), c(1.3, 0.7), c(0.2, -2.5), c(6.0, 1.0), c(0.05, 0.3)];
    let mut worst = 0.0f64;
    for (bc, domain) in &cases {
        let u = bc.to_unitary(*domain).map_err(|e| e.to_string())?;
        let scale = if *domain == Domain::HalfLine { 3.0 } else { 1.0 };
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let a = (i as f64 * 0.6180339887).fract();
                let b = (i as f64 * 0.4142135623 + 0.11).fract();
                (a * scale, b * scale)
            })
            .collect();
        for &z in &zs {
            let k = krein_resolvent(&u, z).map_err(|e| format!("{bc}: {e}"))?;
            let cf = closed_form_resolvent(bc, *domain, z).map_err(|e| format!("{bc}: {e}"))?;
            for &(x, y) in &pts {
                // scale by the diagonal so that zeros of the kernel (Dirichlet walls) stay meaningful
                let scale = cf.value(x, y).norm().max(cf.value(y, y).norm());
                let r = (k.value(x, y) - cf.value(x, y)).norm() / scale;
                worst = worst.max(r);
                ensure(r < 1e-10, || format!("{bc} on {domain}: z={z} x={x} y={y} rel={r:.2e}"))?;
            }
        }
    }
    Ok(format!("{} conditions, max rel diff {worst:.2e}", cases.len()))
}

// ---------------------------------------------------------------- 2

fn dirichlet_half_line_reduction() -> Check {
    let u = NamedBc::Dirichlet.to_unitary(Domain::HalfLine).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: f64 = rng.random::<f64>() * 4.0;
        let y: f64 = rng.random::<f64>() * 4.0;
        let z = c(rng.random::<f64>() * 5.0 + 0.01, (rng.random::<f64>() - 0.5) * 8.0);
        let s = (z * 2.0).sqrt();
        let want = ((-s * (x - y).abs()).exp() - (-s * (x + y)).exp()) / (s * 2.0);
        let got = krein_resolvent(&u, z).map_err(|e| e.to_string())?.value(x, y);
        let err = (got - want).norm() / want.norm().max(1.0);
        worst = worst.max(err);
        ensure(err < 1e-12, || format!("x={x} y={y} z={z}: err {err:.2e}"))?;
    }
    Ok(format!("50 random points, max err {worst:.2e}"))
}

// ---------------------------------------------------------------- 3

fn known_spectra() -> Check {
    let check = |bc: NamedBc, want: Vec<(f64, usize)>| -> std::result::Result<f64, String> {
        let u = bc.to_unitary(Domain::UnitInterval).unwrap();
        let spec = solve_spectrum(&u, 10).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        let mut count = 0;
        for (pair, (e, m)) in spec.pairs.iter().zip(&want) {
            if count >= 10 {
                break;
            }
            let err = if *e == 0.0 { pair.eigenvalue.abs() } else { (pair.eigenvalue - e).abs() / e };
            worst = worst.max(err);
            ensure(err < 1e-9, || format!("{bc}: {} vs {e}", pair.eigenvalue))?;
            ensure(pair.multiplicity == *m, || format!("{bc}: multiplicity {} vs {m} at {e}", pair.multiplicity))?;
            count += m;
        }
        ensure(count >= 10, || format!("{bc}: only {count} levels compared"))?;
        Ok(worst)
    };
    let mut worst = 0.0f64;
    worst = worst.max(check(NamedBc::Dirichlet, (1..=10).map(|n| (0.5 * (n as f64 * PI).powi(2), 1)).collect())?);
    let mut periodic = vec![(0.0, 1)];
    periodic.extend((1..=5).map(|n| (2.0 * PI * PI * (n * n) as f64, 2)));
    worst = worst.max(check(NamedBc::Periodic, periodic)?);
    for eps in [0.4, 1.9, 3.0] {
        let mut levels: Vec<f64> = (-6..=6).map(|n| 0.5 * (2.0 * PI * n as f64 + eps).powi(2)).collect();
        levels.sort_by(f64::total_cmp);
        worst = worst.max(check(NamedBc::PseudoPeriodic { epsilon: eps }, levels.into_iter().map(|e| (e, 1)).collect())?);
    }
    Ok(format!("Dirichlet, periodic, 3 pseudo-periodic phases; max rel err {worst:.2e}"))
}

// ---------------------------------------------------------------- 4

/// Independent delta-on-a-circle levels: even sector from the matching
/// condition `2k sin(k/2) = a cos(k/2)` (and `2 kappa tanh(kappa/2) = -a`
/// below zero), odd sector `k = 2 pi n`.
fn delta_oracle(a: f64, count: usize) -> Vec<f64> {
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                return mid;
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs() {
                break;
            }
        }
        0.5 * (lo + hi)
    }
    let mut levels = vec![];
    if a < 0.0 {
        let g = |kappa: f64| 2.0 * kappa * (kappa / 2.0).tanh() + a;
        let kappa = bisect(g, 1e-12, 1.0 - a);
        levels.push(-0.5 * kappa * kappa);
    }
    let f = |k: f64| 2.0 * k * (k / 2.0).sin() - a * (k / 2.0).cos();
    let h = 1e-3;
    let mut k = h;
    while levels.len() < 3 * count {
        if f(k) == 0.0 || (f(k) > 0.0) != (f(k + h) > 0.0) {
            let r = bisect(f, k, k + h);
            levels.push(0.5 * r * r);
        }
        k += h;
    }
    for n in 1..=count {
        levels.push(0.5 * (2.0 * PI * n as f64).powi(2));
    }
    levels.sort_by(f64::total_cmp);
    levels.truncate(count);
    levels
}

fn delta_point_spectrum() -> Check {
    let mut worst = 0.0f64;
    for a in [1.0, -1.0, 5.0, -5.0] {
        let u = NamedBc::DeltaPoint { a }.to_unitary(Domain::UnitInterval).unwrap();
        let got = solve_spectrum(&u, 8).map_err(|e| e.to_string())?.eigenvalues();
        let want = delta_oracle(a, 8);
        for (g, w) in got.iter().zip(&want) {
            let err = (g - w).abs() / w.abs().max(1.0);
            worst = worst.max(err);
            ensure(err < 1e-8, || format!("a={a}: {g} vs oracle {w}"))?;
        }
    }
    Ok(format!("a in {{+-1, +-5}}, 8 levels each, max rel err {worst:.2e}"))
}

// ---------------------------------------------------------------- 5

fn route_agreement() -> Check {
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let times = [0.05, 0.2, 1.0];
    let bcs = [
        NamedBc::Neumann,
        NamedBc::Dirichlet,
        NamedBc::Periodic,
        NamedBc::PseudoPeriodic { epsilon: 1.1 },
        NamedBc::PseudoPeriodic { epsilon: -2.6 },
    ];
    let mut worst = 0.0f64;
    for bc in &bcs {
        let u = bc.to_unitary(Domain::UnitInterval).unwrap();
        let spectral = SpectralKernel::new(&u, times[0], 1e-16).map_err(|e| e.to_string())?;
        let family = ResolventFamily::krein(u.clone());
        let bound = find_bound_states(&u, 50.0).map_err(|e| e.to_string())?;
        for &t in &times {
            for &x in &grid {
                for &y in &grid {
                    let img = image_sum_kernel(bc, Domain::UnitInterval, t, x, y, IMAGE_TOL).map_err(|e| e.to_string())?;
                    let spe = spectral.eval(t, x, y).map_err(|e| e.to_string())?;
                    let lap = inverse_laplace_kernel(&family, t, x, y, &bound).map_err(|e| e.to_string())?;
                    for (name, v) in [("spectral", spe), ("laplace", lap)] {
                        let r = rel(v, img);
                        worst = worst.max(r);
                        ensure(r < 1e-6, || format!("{bc} T={t} x={x} y={y}: images {img} vs {name} {v} (rel {r:.2e})"))?;
                    }
                    let r = rel(spe, lap);
                    ensure(r < 1e-6, || format!("{bc} T={t} x={x} y={y}: spectral vs laplace rel {r:.2e}"))?;
                }
            }
        }
    }
    Ok(format!("{} conditions x 3 times x 25 points, max rel diff {worst:.2e}", bcs.len()))
}

// ---------------------------------------------------------------- 6

fn laplace_pair() -> Check {
    let cases = [
        (NamedBc::Neumann, Domain::HalfLine, 0.4, 1.3),
        (NamedBc::Dirichlet, Domain::HalfLine, 0.4, 1.3),
        (NamedBc::Neumann, Domain::UnitInterval, 0.2, 0.6),
        (NamedBc::Dirichlet, Domain::UnitInterval, 0.2, 0.6),
        (NamedBc::Periodic, Domain::UnitInterval, 0.2, 0.6),
        (NamedBc::PseudoPeriodic { epsilon: 0.9 }, Domain::UnitInterval, 0.2, 0.6),
    ];
    let zs = [c(0.5, 0.0), c(1.0, 0.5), c(2.0, 0.0), c(3.0, -1.0), c(0.25, 0.1)];
    let mut worst = 0.0f64;
    for (bc, domain, x, y) in &cases {
        let kernel = ImageSumKernel::new(bc.clone(), *domain).map_err(|e| e.to_string())?;
        for &z in &zs {
            let forward = forward_laplace_check(&kernel, z, *x, *y).map_err(|e| format!("{bc}: {e}"))?;
            let want = closed_form_resolvent(bc, *domain, z).map_err(|e| e.to_string())?.value(*x, *y);
            let r = rel(forward, want);
            worst = worst.max(r);
            ensure(r < 1e-7, || format!("{bc} on {domain}, z={z}: forward {forward} vs resolvent {want}"))?;
        }
    }
    Ok(format!("{} kernels x 5 z, max rel diff {worst:.2e}", cases.len()))
}

// ---------------------------------------------------------------- 7

fn robin_bound_state() -> Check {
    let bc = NamedBc::RobinHalfLine { alpha: -PI / 2.0 };
    let report = find_bound_states_named(&bc, Domain::HalfLine, 10.0).map_err(|e| e.to_string())?;
    ensure(report.poles.len() == 1, || format!("expected one pole, got {:?}", report.poles))?;
    let pole = report.poles[0];
    ensure((pole - 0.5).abs() < 1e-10, || format!("pole at {pole}"))?;
    let family = ResolventFamily::closed_form(bc, Domain::HalfLine).map_err(|e| e.to_string())?;
    let k = |t: f64| inverse_laplace_kernel(&family, t, 0.0, 0.0, &report).map(|v| v.re);
    let (k4, k8) = (k(4.0).map_err(|e| e.to_string())?, k(8.0).map_err(|e| e.to_string())?);
    let slope = (k8.ln() - k4.ln()) / 4.0;
    ensure((slope - 0.5).abs() < 0.01, || format!("log-slope {slope}"))?;
    Ok(format!("pole z* = {pole:.12}, log-slope over [4, 8] = {slope:.5}"))
}

// ---------------------------------------------------------------- 8

fn within(est: &McEstimate, oracle: C64) -> bool {
    (est.mean - oracle).norm() <= 3.0 * est.std_error + 1e-9 * oracle.norm()
}

fn monte_carlo() -> Check {
    const PATHS: usize = 100_000;
    const STEPS: usize = 32;
    type Runner = Box<dyn Fn(McConfig) -> kreinpath::Result<McEstimate>>;
    let img = |bc: NamedBc, d: Domain, t: f64, x: f64, y: f64| image_sum_kernel(&bc, d, t, x, y, IMAGE_TOL).unwrap();
    let antiperiodic = (-40..=40)
        .map(|n: i32| if n % 2 == 0 { 1.0 } else { -1.0 } * free_kernel(0.1, n as f64))
        .sum::<f64>();
    let points: Vec<(&str, McConfig, Runner, C64)> = vec![
        ("dirichlet interval T=0.02", McConfig::new(0.02, 0.5, 0.5), Box::new(|c| mc_dirichlet_kernel(&c, Domain::UnitInterval)), c(free_kernel(0.02, 0.0), 0.0)),
        ("dirichlet interval T=0.5", McConfig::new(0.5, 0.5, 0.5), Box::new(|c| mc_dirichlet_kernel(&c, Domain::UnitInterval)), img(NamedBc::Dirichlet, Domain::UnitInterval, 0.5, 0.5, 0.5)),
        ("dirichlet half-line", McConfig::new(0.5, 1.0, 1.0), Box::new(|c| mc_dirichlet_kernel(&c, Domain::HalfLine)), c((1.0 - (-4.0f64).exp()) / PI.sqrt(), 0.0)),
        ("neumann half-line origin", McConfig::new(0.5, 0.0, 0.0), Box::new(|c| mc_neumann_kernel(&c, Domain::HalfLine)), c(2.0 / PI.sqrt(), 0.0)),
        ("neumann half-line (1,2)", McConfig::new(1.0, 1.0, 2.0), Box::new(|c| mc_neumann_kernel(&c, Domain::HalfLine)), c(((-0.5f64).exp() + (-4.5f64).exp()) / (2.0 * PI).sqrt(), 0.0)),
        ("neumann interval", McConfig::new(0.3, 0.2, 0.7), Box::new(|c| mc_neumann_kernel(&c, Domain::UnitInterval)), img(NamedBc::Neumann, Domain::UnitInterval, 0.3, 0.2, 0.7)),
        ("winding eps=0 T=3", McConfig::new(3.0, 0.3, 0.8), Box::new(|c| mc_winding_kernel(&c, 0.0)), c(1.0, 0.0)),
        ("winding eps=pi T=0.1", McConfig::new(0.1, 0.4, 0.4), Box::new(|c| mc_winding_kernel(&c, PI)), c(antiperiodic, 0.0)),
        ("winding eps=1.3", McConfig::new(0.4, 0.25, 0.6), Box::new(|c| mc_winding_kernel(&c, 1.3)), img(NamedBc::PseudoPeriodic { epsilon: 1.3 }, Domain::UnitInterval, 0.4, 0.25, 0.6)),
    ];
    ensure((free_kernel(0.02, 0.0) - 2.8209).abs() < 1e-4, || "free kernel".into())?;
    ensure(((1.0 - (-4.0f64).exp()) / PI.sqrt() - 0.5538561).abs() < 1e-7, || "half-line Dirichlet oracle".into())?;
    ensure((((-0.5f64).exp() + (-4.5f64).exp()) / (2.0 * PI).sqrt() - 0.24640).abs() < 1e-5, || "half-line Neumann oracle".into())?;

    let mut summary = vec![];
    for (name, base, run, oracle) in &points {
        let mut failures = 0;
        for seed in 0..20u64 {
            let est = run(base.paths(PATHS).steps(STEPS).seed(seed)).map_err(|e| format!("{name}: {e}"))?;
            if !within(&est, *oracle) {
                failures += 1;
            }
        }
        ensure(failures <= 1, || format!("{name}: {failures} of 20 seeds outside 3 sigma"))?;
        summary.push(failures);

        let small = run(base.paths(PATHS / 4).steps(STEPS).seed(99)).map_err(|e| e.to_string())?;
        let large = run(base.paths(PATHS).steps(STEPS).seed(99)).map_err(|e| e.to_string())?;
        if small.std_error > 0.0 {
            let ratio = large.std_error / small.std_error;
            ensure(ratio > 0.5 / 1.5 && ratio < 0.5 * 1.5, || format!("{name}: std error ratio {ratio:.3}"))?;
        }
    }

    // symmetry checks
    let a = mc_neumann_kernel(&McConfig::new(0.7, 0.3, 1.1).paths(PATHS).steps(STEPS).seed(5), Domain::HalfLine).map_err(|e| e.to_string())?;
    let b = mc_neumann_kernel(&McConfig::new(0.7, 1.1, 0.3).paths(PATHS).steps(STEPS).seed(6), Domain::HalfLine).map_err(|e| e.to_string())?;
    let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    ensure((a.mean - b.mean).norm() <= 3.0 * joint, || "neumann reflection symmetry".into())?;
    let p = mc_winding_kernel(&McConfig::new(0.3, 0.5, 0.5).paths(PATHS).steps(STEPS).seed(7), 0.8).map_err(|e| e.to_string())?;
    let m = mc_winding_kernel(&McConfig::new(0.3, 0.5, 0.5).paths(PATHS).steps(STEPS).seed(8), -0.8).map_err(|e| e.to_string())?;
    let joint = (p.std_error.powi(2) + m.std_error.powi(2)).sqrt();
    ensure((p.mean - m.mean.conj()).norm() <= 3.0 * joint, || "winding conjugation symmetry".into())?;

    Ok(format!("{} example points x 20 seeds, failures per point {:?}", points.len(), summary))
}

// ---------------------------------------------------------------- 9

fn physical_invariants() -> Check {
    let (t, s): (f64, f64) = (0.15, 0.25);
    let panels = 64;
    let mut worst_ck = 0.0f64;
    // Chapman-Kolmogorov on the interval for every named condition, via eigensums
    let interval_bcs = [
        NamedBc::Neumann,
        NamedBc::Dirichlet,
        NamedBc::Periodic,
        NamedBc::PseudoPeriodic { epsilon: 0.7 },
        NamedBc::QuasiPeriodic { alpha: 1.1 },
        NamedBc::DeltaPoint { a: -3.0 },
        NamedBc::DeltaPoint { a: 4.0 },
    ];
    for bc in &interval_bcs {
        let u = bc.to_unitary(Domain::UnitInterval).unwrap();
        let spec = spectrum_for_time(&u, t.min(s), 1e-16).map_err(|e| e.to_string())?;
        let k = |tt: f64, a: f64, b: f64| spectral_heat_kernel(&spec, tt, a, b, 1e-15).unwrap();
        for (x, y) in [(0.2, 0.7), (0.5, 0.5), (0.05, 0.9)] {
            let lhs = kronrod_composite(0.0, 1.0, panels, |w| k(t, x, w) * k(s, w, y));
            let rhs = k(t + s, x, y);
            let r = rel(lhs, rhs);
            worst_ck = worst_ck.max(r);
            ensure(r < 1e-6, || format!("{bc}: Chapman-Kolmogorov rel {r:.2e}"))?;
        }
    }
    // ... and on the half-line with the image kernels
    for bc in [NamedBc::Neumann, NamedBc::Dirichlet] {
        let k = |tt: f64, a: f64, b: f64| image_sum_kernel(&bc, Domain::HalfLine, tt, a, b, IMAGE_TOL).unwrap();
        let (x, y) = (0.3, 0.8);
        let lhs = kronrod_composite(0.0, 12.0, 256, |w| k(t, x, w) * k(s, w, y));
        let r = rel(lhs, k(t + s, x, y));
        worst_ck = worst_ck.max(r);
        ensure(r < 1e-6, || format!("{bc} half-line: Chapman-Kolmogorov rel {r:.2e}"))?;
    }

    // normalisation
    let mut worst_norm = 0.0f64;
    for (bc, conserved) in [
        (NamedBc::Neumann, true),
        (NamedBc::Periodic, true),
        (NamedBc::Dirichlet, false),
    ] {
        for tt in [0.05, 0.3, 2.0] {
            for x in [0.0, 0.3, 0.5, 1.0] {
                let mass = kronrod_composite(0.0, 1.0, panels, |y| {
                    image_sum_kernel(&bc, Domain::UnitInterval, tt, x, y, IMAGE_TOL).unwrap()
                });
                if conserved {
                    worst_norm = worst_norm.max((mass.re - 1.0).abs());
                    ensure((mass - c(1.0, 0.0)).norm() < 1e-7, || format!("{bc}: mass {mass} at T={tt} x={x}"))?;
                } else {
                    ensure(mass.re <= 1.0 + 1e-12 && mass.im == 0.0, || format!("{bc}: mass {mass}"))?;
                }
            }
        }
    }
    let mass = kronrod_composite(0.0, 15.0, 256, |y| {
        image_sum_kernel(&NamedBc::Neumann, Domain::HalfLine, 1.0, 0.4, y, IMAGE_TOL).unwrap()
    });
    ensure((mass.re - 1.0).abs() < 1e-7, || format!("half-line Neumann mass {mass}"))?;
    let pp = kronrod_composite(0.0, 1.0, panels, |y| {
        image_sum_kernel(&NamedBc::PseudoPeriodic { epsilon: 2.0 }, Domain::UnitInterval, 0.2, 0.3, y, IMAGE_TOL).unwrap()
    });
    ensure(pp.norm() <= 1.0, || format!("pseudo-periodic mass {pp}"))?;

    // boundary condition satisfied by resolvent columns, for the whole catalog
    let mut checked = 0;
    for domain in [Domain::HalfLine, Domain::UnitInterval] {
        let mut bcs: Vec<NamedBc> = NamedBc::catalog().into_iter().filter(|b| b.supports(domain)).collect();
        bcs.push(NamedBc::RobinHalfLine { alpha: -1.0 });
        bcs.push(NamedBc::QuasiPeriodic { alpha: 2.4 });
        bcs.push(NamedBc::DeltaPoint { a: -6.0 });
        for bc in bcs.iter().filter(|b| b.supports(domain)) {
            let u = bc.to_unitary(domain).unwrap();
            for z in [c(0.8, 0.0), c(2.0, -1.5)] {
                let r = krein_resolvent(&u, z).map_err(|e| format!("{bc}: {e}"))?;
                for y in [0.25, 0.6] {
                    let ok = satisfies_bc(&u, &r.boundary_data(y), 1e-8).unwrap();
                    ensure(ok, || format!("{bc} on {domain}: column y={y} violates the condition"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "CK max rel {worst_ck:.2e}; mass max dev {worst_norm:.2e}; {checked} resolvent columns satisfy their condition"
    ))
}

fn main() {
    let criteria: Vec<(usize, &str, Duration, fn() -> Check)> = vec![
        (1, "Krein resolvent equals closed forms", Duration::from_secs(1), krein_matches_closed_forms),
        (2, "half-line Dirichlet reduction", Duration::from_millis(100), dirichlet_half_line_reduction),
        (3, "known spectra", Duration::from_secs(2), known_spectra),
        (4, "delta-point spectrum", Duration::from_secs(5), delta_point_spectrum),
        (5, "kernel route agreement", Duration::from_secs(30), route_agreement),
        (6, "Laplace pair", Duration::from_secs(10), laplace_pair),
        (7, "Robin bound state", Duration::from_secs(5), robin_bound_state),
        (8, "Monte Carlo estimators", Duration::from_secs(60), monte_carlo),
        (9, "physical invariants", Duration::from_secs(60), physical_invariants),
    ];
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {elapsed:.2?}, budget {budget:.2?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {n} ({name}): {status} [{elapsed:.2?}] {detail}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
