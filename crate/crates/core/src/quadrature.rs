//! Composite Simpson and adaptive Gauss-Kronrod rules for complex integrands.

use num_complex::Complex64;

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn simpson<F>(a: f64, b: f64, panels: usize, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + h * i as f64) * w;
    }
    acc * (h / 3.0)
}

/// Real-valued Simpson rule.
pub fn simpson_real<F>(a: f64, b: f64, panels: usize, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    simpson(a, b, panels, |x| Complex64::new(f(x), 0.0)).re
}

/// Trapezoid rule on uniformly spaced samples covering [a, b].
pub fn trapezoid(samples: &[Complex64], a: f64, b: f64) -> Complex64 {
    let n = samples.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let h = (b - a) / (n - 1) as f64;
    let inner: Complex64 = samples[1..n - 1].iter().sum();
    (inner + (samples[0] + samples[n - 1]) * 0.5) * h
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F, E>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64), E>
where
    F: Fn(f64) -> Result<Complex64, E>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx)? + f(centre + dx)?;
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    Ok((k, (k - g).norm()))
}

/// Composite 15-point Kronrod rule on `panels` equal subintervals.
///
/// Accurate to round-off for smooth integrands that oscillate less than a
/// few times per panel.
pub fn kronrod_composite<F>(a: f64, b: f64, panels: usize, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..n {
        let lo = a + h * p as f64;
        let centre = lo + 0.5 * h;
        let mut panel = f(centre) * WGK[7];
        for j in 0..7 {
            let dx = 0.5 * h * XGK[j];
            panel += (f(centre - dx) + f(centre + dx)) * WGK[j];
        }
        acc += panel * (0.5 * h);
    }
    acc
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Adaptive Gauss-Kronrod (7/15) integration by recursive bisection.
pub fn adaptive_gk<F, E>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature, E>
where
    F: Fn(f64) -> Result<Complex64, E>,
{
    const MAX_INTERVALS: usize = 4000;
    let (v0, e0) = gk15(&f, a, b)?;
    let mut pieces = vec![(a, b, v0, e0)];
    let mut total = v0;
    let mut error = e0;
    while error > abs_tol.max(rel_tol * total.norm()) {
        if pieces.len() >= MAX_INTERVALS {
            return Ok(Quadrature {
                value: total,
                error,
                converged: false,
            });
        }
        // Split the piece with the largest error estimate.
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        let (lo, hi, v, e) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(Quadrature {
                value: total,
                error,
                converged: false,
            });
        }
        let (vl, el) = gk15(&f, lo, mid)?;
        let (vr, er) = gk15(&f, mid, hi)?;
        total += vl + vr - v;
        error += el + er - e;
        pieces.push((lo, mid, vl, el));
        pieces.push((mid, hi, vr, er));
    }
    // Re-sum to shed the drift of incremental updates.
    let value = pieces.iter().map(|p| p.2).sum();
    let error = pieces.iter().map(|p| p.3).sum();
    Ok(Quadrature {
        value,
        error,
        converged: true,
    })
}
