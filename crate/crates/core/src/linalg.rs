//! Small dense complex linear algebra used by the Krein and secular solvers.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

pub(crate) type C64 = Complex64;
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues of a 2x2 matrix, computed from the entry differences so that
/// nearly coincident eigenvalues keep full relative accuracy.
pub(crate) fn eig2(m: &Matrix2<C64>) -> [C64; 2] {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    [half_tr + disc, half_tr - disc]
}

/// Singular values of a small complex matrix, descending.
pub(crate) fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Condition number sigma_max / sigma_min (infinite for singular input).
pub(crate) fn condition_number(m: &DMatrix<C64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Right singular vectors of a 2x2 matrix ordered by ascending singular value.
pub(crate) fn svd2_ascending(m: &Matrix2<C64>) -> ([f64; 2], [[C64; 2]; 2]) {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let s = svd.singular_values;
    let order = if s[0] <= s[1] { [0, 1] } else { [1, 0] };
    let vec_of = |row: usize| [v_t[(row, 0)].conj(), v_t[(row, 1)].conj()];
    (
        [s[order[0]], s[order[1]]],
        [vec_of(order[0]), vec_of(order[1])],
    )
}

pub(crate) fn dmatrix2(m: &DMatrix<C64>) -> Matrix2<C64> {
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Wrap an angle into (-pi, pi].
pub(crate) fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Golden-section minimisation of a unimodal function on [a, b].
pub(crate) fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
