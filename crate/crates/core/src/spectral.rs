//! Eigenvalue problem of `H = -(1/2) d^2/dx^2` on [0, 1] for an arbitrary
//! boundary unitary.
//!
//! Roots are located by counting eigenphases. For a real two-function basis
//! with boundary frame `P` (values) and `Q` (outward derivatives), the
//! solution space at energy `E` has Cayley matrix `W(E) = (P - iQ)(P + iQ)^{-1}`,
//! and `E` is an eigenvalue exactly when `W(E)^† U` has eigenvalue 1. The two
//! eigenphases of that matrix move monotonically (clockwise) with `E`, so
//! counting their passages through 0 counts eigenvalues with multiplicity.
//! Bisection on that count isolates every root, including degenerate pairs
//! and near-degenerate pairs that a minimum search would merge.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::bc::{BoundaryData, BoundaryUnitary, Domain};
use crate::error::{Error, Result};
use crate::linalg::{dmatrix2, eig2, golden_section, svd2_ascending, wrap_angle, C64, I};
use crate::quadrature::kronrod_composite;

/// Grid resolution of the eigenphase scan, points per unit of k (or kappa).
pub const SCAN_DENSITY: f64 = 40.0;
/// Default depth of the negative-energy search, in binding constant kappa.
pub const DEFAULT_KAPPA_MAX: f64 = 50.0;
/// Residual threshold accepted at a root (smallest singular value over frame norm).
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Largest eigenphase change accepted in one scan step.
const MAX_PHASE_STEP: f64 = PI / 8.0;
const MAX_REFINE_DEPTH: usize = 40;

/// Real basis of solutions of `-(1/2) f'' = E f` used at a given energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Basis {
    /// `{cos kx, sin(kx)/k}`, E = k^2/2 > 0.
    Trig { k: f64 },
    /// `{1, x}`, E = 0.
    Linear,
    /// `{cosh kx, sinh(kx)/k}`, E = -k^2/2.
    Hyper { kappa: f64 },
    /// `{e^{-kx}, e^{-k(1-x)}}`, E = -k^2/2; well conditioned for large kappa.
    Exp { kappa: f64 },
}

impl Basis {
    pub fn for_energy(e: f64) -> Basis {
        if e > 0.0 {
            Basis::Trig { k: (2.0 * e).sqrt() }
        } else if e == 0.0 {
            Basis::Linear
        } else {
            let kappa = (-2.0 * e).sqrt();
            if kappa < 1.0 {
                Basis::Hyper { kappa }
            } else {
                Basis::Exp { kappa }
            }
        }
    }

    /// The cos/sin, {1, x} or cosh/sinh basis with no switch to exponentials.
    fn canonical(e: f64) -> Basis {
        match Basis::for_energy(e) {
            Basis::Exp { kappa } => Basis::Hyper { kappa },
            b => b,
        }
    }

    pub fn energy(&self) -> f64 {
        match *self {
            Basis::Trig { k } => 0.5 * k * k,
            Basis::Linear => 0.0,
            Basis::Hyper { kappa } | Basis::Exp { kappa } => -0.5 * kappa * kappa,
        }
    }

    pub fn values(&self, x: f64) -> [f64; 2] {
        match *self {
            Basis::Trig { k } => [(k * x).cos(), sinc_scaled(k, x)],
            Basis::Linear => [1.0, x],
            Basis::Hyper { kappa } => [(kappa * x).cosh(), sinhc_scaled(kappa, x)],
            Basis::Exp { kappa } => [(-kappa * x).exp(), (-kappa * (1.0 - x)).exp()],
        }
    }

    pub fn derivatives(&self, x: f64) -> [f64; 2] {
        match *self {
            Basis::Trig { k } => [-k * (k * x).sin(), (k * x).cos()],
            Basis::Linear => [0.0, 1.0],
            Basis::Hyper { kappa } => [kappa * (kappa * x).sinh(), (kappa * x).cosh()],
            Basis::Exp { kappa } => [
                -kappa * (-kappa * x).exp(),
                kappa * (-kappa * (1.0 - x)).exp(),
            ],
        }
    }

    /// Boundary frame: rows are boundary points, columns basis functions.
    /// `P` holds values, `Q` outward normal derivatives.
    pub fn frame(&self) -> (Matrix2<C64>, Matrix2<C64>) {
        let (v0, v1) = (self.values(0.0), self.values(1.0));
        let (d0, d1) = (self.derivatives(0.0), self.derivatives(1.0));
        let r = |v: f64| C64::new(v, 0.0);
        let p = Matrix2::new(r(v0[0]), r(v0[1]), r(v1[0]), r(v1[1]));
        let q = Matrix2::new(r(-d0[0]), r(-d0[1]), r(d1[0]), r(d1[1]));
        (p, q)
    }
}

// sin(kx)/k, finite as k -> 0
fn sinc_scaled(k: f64, x: f64) -> f64 {
    if k * x.abs() < 1e-8 {
        x
    } else {
        (k * x).sin() / k
    }
}

fn sinhc_scaled(kappa: f64, x: f64) -> f64 {
    if kappa * x.abs() < 1e-8 {
        x
    } else {
        (kappa * x).sinh() / kappa
    }
}

fn interval_matrix(u: &BoundaryUnitary) -> Result<Matrix2<C64>> {
    if u.domain() != Domain::UnitInterval {
        return Err(Error::InvalidArgument(
            "the spectral solver needs a boundary unitary on the interval".into(),
        ));
    }
    Ok(dmatrix2(u.matrix()))
}

fn secular_in(u: &Matrix2<C64>, basis: Basis) -> Matrix2<C64> {
    let (p, q) = basis.frame();
    let id = Matrix2::identity();
    (id - u) * p - (id + u) * q * I
}

/// Secular matrix `(I - U) P - i (I + U) Q` acting on basis coefficients:
/// cos/sin for E > 0, {1, x} at E = 0, cosh/sinh for E < 0.
pub fn secular_matrix(u: &BoundaryUnitary, e: f64) -> Result<Matrix2<C64>> {
    Ok(secular_in(&interval_matrix(u)?, Basis::canonical(e)))
}

/// Eigenphases of `W(E)^† U` in (-pi, pi].
fn eigenphases(u: &Matrix2<C64>, e: f64) -> [f64; 2] {
    let (p, q) = Basis::for_energy(e).frame();
    let plus = p + q * I;
    let minus = p - q * I;
    // P + iQ is invertible for real E: a solution with f = -i f_n at both
    // ends would have Im sum conj(f) f_n = sum |f_n|^2 > 0, while the
    // Wronskian identity makes that imaginary part vanish.
    let inv = plus.try_inverse().unwrap_or_else(Matrix2::identity);
    let w = minus * inv;
    let a = w.adjoint() * u;
    let [l0, l1] = eig2(&a);
    [l0.arg(), l1.arg()]
}

/// Order `next` to follow `prev` by least circular displacement.
fn match_phases(prev: [f64; 2], next: [f64; 2]) -> [f64; 2] {
    let d = |a: f64, b: f64| wrap_angle(b - a).abs();
    let straight = d(prev[0], next[0]) + d(prev[1], next[1]);
    let crossed = d(prev[0], next[1]) + d(prev[1], next[0]);
    if crossed < straight {
        [next[1], next[0]]
    } else {
        next
    }
}

/// Counter-clockwise motion below this is round-off, not a near-full turn.
const PHASE_NOISE: f64 = 1e-9;

/// Signed displacement from `prev` to `next`. The eigenphases only move
/// clockwise as `E` grows, so an apparent small counter-clockwise step is
/// really a clockwise step of almost a full turn, unless it is round-off.
fn displacement(prev: f64, next: f64) -> f64 {
    let cw = (prev - next).rem_euclid(2.0 * PI);
    if cw > 2.0 * PI - PHASE_NOISE {
        2.0 * PI - cw
    } else {
        -cw
    }
}

/// Net clockwise passages through phase 0 between matched phase pairs.
fn crossings(prev: [f64; 2], next: [f64; 2]) -> i64 {
    let mut count = 0;
    for j in 0..2 {
        // `next` itself, shifted by whole turns to sit at prev + displacement;
        // forming prev + displacement directly would round tiny phases to zero.
        let target = prev[j] + displacement(prev[j], next[j]);
        let unwrapped = next[j] + 2.0 * PI * ((target - next[j]) / (2.0 * PI)).round();
        if prev[j] > 0.0 && unwrapped <= 0.0 {
            count += 1;
        } else if prev[j] <= 0.0 && unwrapped > 0.0 {
            count -= 1;
        }
        // a turn of more than pi starting at or below zero passes zero again
        if prev[j] <= 0.0 && unwrapped <= -2.0 * PI {
            count += 1;
        }
    }
    count
}

struct PhaseScan<'a> {
    u: &'a Matrix2<C64>,
    roots: Vec<(f64, usize)>,
}

impl PhaseScan<'_> {
    fn isolate(&mut self, a: f64, pa: [f64; 2], b: f64, pb: [f64; 2], count: i64, depth: usize) {
        if count <= 0 {
            return;
        }
        let width_tol = 1e-14 * a.abs().max(b.abs()).max(1.0);
        if b - a <= width_tol || depth > 200 {
            self.roots.push((0.5 * (a + b), count as usize));
            return;
        }
        let m = 0.5 * (a + b);
        let pm = match_phases(pa, eigenphases(self.u, m));
        // Round-off can flip the sign of a phase sitting on a root; the
        // cell total is reliable, so keep the split consistent with it.
        let left = crossings(pa, pm).clamp(0, count);
        let pb = match_phases(pm, pb);
        self.isolate(a, pa, m, pm, left, depth + 1);
        self.isolate(m, pm, b, pb, count - left, depth + 1);
    }

    /// Step from `a` to `b`, halving the step until no phase moves by more
    /// than `MAX_PHASE_STEP`. Near the eigenvalues of large-`k` extensions
    /// one phase swings through almost a full turn within a window much
    /// finer than the base grid; a coarse step would see that turn as a
    /// small move, or pair the phase with its partner, and lose a crossing.
    /// With short steps the net count does not depend on the pairing.
    fn advance(&mut self, a: f64, pa: [f64; 2], b: f64, depth: usize) -> [f64; 2] {
        let pb = match_phases(pa, eigenphases(self.u, b));
        let step = (0..2).map(|j| displacement(pa[j], pb[j]).abs()).fold(0.0, f64::max);
        if step > MAX_PHASE_STEP && depth < MAX_REFINE_DEPTH {
            let m = 0.5 * (a + b);
            let pm = self.advance(a, pa, m, depth + 1);
            return self.advance(m, pm, b, depth + 1);
        }
        let count = crossings(pa, pb);
        self.isolate(a, pa, b, pb, count, 0);
        pb
    }

    /// Walk an ascending energy grid and isolate every counted root.
    fn run(&mut self, grid: &[f64]) {
        let mut prev_e = grid[0];
        let mut prev = eigenphases(self.u, prev_e);
        for &e in &grid[1..] {
            prev = self.advance(prev_e, prev, e, 0);
            prev_e = e;
        }
    }
}

fn negative_grid(kappa_max: f64) -> Vec<f64> {
    let steps = (kappa_max * SCAN_DENSITY).ceil() as usize;
    (0..steps)
        .map(|j| {
            let kappa = kappa_max * (steps - j) as f64 / steps as f64;
            -0.5 * kappa * kappa
        })
        .chain(std::iter::once(0.0))
        .collect()
}

fn snap_zero(e: f64) -> f64 {
    if e.abs() < 1e-12 {
        0.0
    } else {
        e
    }
}

/// Negative eigenvalues `E >= -kappa_max^2 / 2` with multiplicities.
pub fn negative_spectrum(u: &BoundaryUnitary, kappa_max: f64) -> Result<Vec<(f64, usize)>> {
    let m = interval_matrix(u)?;
    let mut scan = PhaseScan { u: &m, roots: vec![] };
    scan.run(&negative_grid(kappa_max));
    Ok(scan
        .roots
        .into_iter()
        .map(|(e, c)| (snap_zero(e), c))
        .filter(|&(e, _)| e < 0.0)
        .collect())
}

/// A normalised eigenfunction, stored analytically as basis coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub basis: Basis,
    pub coeffs: [C64; 2],
}

impl Eigenfunction {
    pub fn eval(&self, x: f64) -> C64 {
        let v = self.basis.values(x);
        self.coeffs[0] * v[0] + self.coeffs[1] * v[1]
    }

    pub fn eval_dx(&self, x: f64) -> C64 {
        let d = self.basis.derivatives(x);
        self.coeffs[0] * d[0] + self.coeffs[1] * d[1]
    }

    pub fn boundary_data(&self) -> BoundaryData {
        BoundaryData::from_function(
            Domain::UnitInterval,
            &[self.eval(0.0), self.eval(1.0)],
            &[self.eval_dx(0.0), self.eval_dx(1.0)],
        )
        .expect("two boundary points")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub eigenfunctions: Vec<Eigenfunction>,
    /// Smallest singular value of the secular matrix relative to the frame norm.
    pub residual: f64,
}

/// Lowest part of the spectrum of one extension, ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    unitary: BoundaryUnitary,
    pub pairs: Vec<EigenPair>,
    pub requested: usize,
}

impl Spectrum {
    pub fn unitary(&self) -> &BoundaryUnitary {
        &self.unitary
    }

    /// Eigenvalues repeated according to multiplicity.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.eigenvalue, p.multiplicity))
            .collect()
    }

    pub fn function_count(&self) -> usize {
        self.pairs.iter().map(|p| p.eigenfunctions.len()).sum()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.pairs.last().map_or(f64::NEG_INFINITY, |p| p.eigenvalue)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.pairs.first().map_or(f64::INFINITY, |p| p.eigenvalue)
    }

    pub fn eigenfunctions(&self) -> impl Iterator<Item = (f64, &Eigenfunction)> {
        self.pairs
            .iter()
            .flat_map(|p| p.eigenfunctions.iter().map(move |f| (p.eigenvalue, f)))
    }
}

const GRAM_PANELS: usize = 64;

fn gram(basis: Basis) -> [[f64; 2]; 2] {
    let entry = |i: usize, j: usize| {
        kronrod_composite(0.0, 1.0, GRAM_PANELS, |x| {
            let v = basis.values(x);
            C64::new(v[i] * v[j], 0.0)
        })
        .re
    };
    let off = entry(0, 1);
    [[entry(0, 0), off], [off, entry(1, 1)]]
}

fn inner(g: &[[f64; 2]; 2], a: &[C64; 2], b: &[C64; 2]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += a[i].conj() * g[i][j] * b[j];
        }
    }
    acc
}

impl Basis {
    /// Norm of the boundary frame with every trigonometric factor replaced
    /// by its bound. At a root the derivative column `k sin k` of the cosine
    /// vanishes, so the frame's own norm collapses from `O(k)` to `O(1)`
    /// exactly where a residual is measured; the envelope does not.
    fn envelope_norm(&self) -> f64 {
        match *self {
            Basis::Trig { k } => {
                let sin_scale = if k > 1.0 { 1.0 / k } else { 1.0 };
                (2.0 * (2.0 + k * k + sin_scale * sin_scale)).sqrt()
            }
            _ => {
                let (p, q) = self.frame();
                (p.norm_squared() + q.norm_squared()).sqrt()
            }
        }
    }
}

/// Smallest singular value of the secular matrix relative to the envelope
/// norm of the frame; of the order of the relative error of the root in `k`.
fn relative_residual(u: &Matrix2<C64>, e: f64) -> f64 {
    let basis = Basis::for_energy(e);
    svd2_ascending(&secular_in(u, basis)).0[0] / basis.envelope_norm()
}

/// Relative width of the window searched when polishing a counted root.
const POLISH_WINDOW: f64 = 1e-7;

/// Refine counted roots on the secular residual, which has a sharp minimum
/// at each eigenvalue. At large `k` the eigenphases move slowly through 0,
/// so round-off in the phases limits the counted position to ~1e-10
/// relative; the residual pins it down to machine precision. The window is
/// kept well inside the gaps to the neighbouring roots.
fn polish_roots(u: &Matrix2<C64>, roots: &mut [(f64, usize)]) {
    let energies: Vec<f64> = roots.iter().map(|r| r.0).collect();
    for (i, root) in roots.iter_mut().enumerate() {
        let e = root.0;
        let mut w = POLISH_WINDOW * e.abs().max(1.0);
        if i > 0 {
            w = w.min(0.25 * (e - energies[i - 1]));
        }
        if let Some(next) = energies.get(i + 1) {
            w = w.min(0.25 * (next - e));
        }
        if !(w > 0.0) {
            continue;
        }
        let before = relative_residual(u, e);
        let (best, after) = golden_section(e - w, e + w, |x| relative_residual(u, x));
        if after < before {
            root.0 = best;
        }
    }
}

fn build_pair(u: &Matrix2<C64>, eigenvalue: f64, multiplicity: usize) -> Result<EigenPair> {
    let basis = Basis::for_energy(eigenvalue);
    let m = secular_in(u, basis);
    let (_, vecs) = svd2_ascending(&m);
    let residual = relative_residual(u, eigenvalue);
    if !(residual < ROOT_RESIDUAL_TOL) {
        return Err(Error::RootFindingFailure(format!(
            "secular residual {residual:.3e} at E = {eigenvalue}"
        )));
    }
    let g = gram(basis);
    let mut funcs: Vec<[C64; 2]> = Vec::with_capacity(multiplicity);
    for v in vecs.iter().take(multiplicity.min(2)) {
        let mut w = *v;
        for f in &funcs {
            let proj = inner(&g, f, &w);
            w = [w[0] - f[0] * proj, w[1] - f[1] * proj];
        }
        let norm = inner(&g, &w, &w).re.sqrt();
        funcs.push([w[0] / norm, w[1] / norm]);
    }
    Ok(EigenPair {
        eigenvalue,
        multiplicity,
        eigenfunctions: funcs
            .into_iter()
            .map(|coeffs| Eigenfunction { basis, coeffs })
            .collect(),
        residual,
    })
}

/// The lowest `n` eigenvalues (counted with multiplicity) with orthonormal
/// eigenfunctions. Negative eigenvalues down to `-DEFAULT_KAPPA_MAX^2/2` are included.
pub fn solve_spectrum(u: &BoundaryUnitary, n: usize) -> Result<Spectrum> {
    solve_spectrum_with(u, n, DEFAULT_KAPPA_MAX)
}

pub fn solve_spectrum_with(u: &BoundaryUnitary, n: usize, kappa_max: f64) -> Result<Spectrum> {
    if n == 0 {
        return Err(Error::InvalidArgument("requested spectrum size must be >= 1".into()));
    }
    let m = interval_matrix(u)?;
    let k_max = (n + 4) as f64 * 2.0 * PI;
    let steps = (k_max * SCAN_DENSITY).ceil() as usize;
    let mut grid = negative_grid(kappa_max);
    grid.extend((1..=steps).map(|j| {
        let k = k_max * j as f64 / steps as f64;
        0.5 * k * k
    }));
    let mut scan = PhaseScan { u: &m, roots: vec![] };
    scan.run(&grid);
    polish_roots(&m, &mut scan.roots);

    let mut pairs = Vec::new();
    let mut total = 0;
    for (e, mult) in scan.roots {
        if total >= n {
            break;
        }
        let pair = build_pair(&m, snap_zero(e), mult)?;
        total += pair.multiplicity;
        pairs.push(pair);
    }
    if total < n {
        return Err(Error::RootFindingFailure(format!(
            "found {total} of {n} eigenvalues below k = {k_max:.3}"
        )));
    }
    Ok(Spectrum {
        unitary: u.clone(),
        pairs,
        requested: n,
    })
}

/// Smallest spectrum whose truncated heat-kernel tail at time `t` is below `tail_tol`.
pub fn spectrum_for_time(u: &BoundaryUnitary, t: f64, tail_tol: f64) -> Result<Spectrum> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t}")));
    }
    let need = (2.0 * (1.0 / tail_tol).ln().max(1.0) / t).sqrt() / PI;
    let mut n = need.ceil() as usize + 4;
    loop {
        let spec = solve_spectrum(u, n)?;
        if (-spec.max_eigenvalue() * t).exp() < tail_tol {
            return Ok(spec);
        }
        n = n * 3 / 2 + 2;
    }
}

/// Truncated eigensum `sum_n e^{-lambda_n T} psi_n(x) conj(psi_n(y))`.
pub fn spectral_heat_kernel(spec: &Spectrum, t: f64, x: f64, y: f64, tail_tol: f64) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t}")));
    }
    let tail = (-spec.max_eigenvalue() * t).exp();
    if !(tail < tail_tol) {
        return Err(Error::InsufficientSpectrum { tail, tol: tail_tol });
    }
    Ok(spec
        .eigenfunctions()
        .map(|(lambda, f)| f.eval(x) * f.eval(y).conj() * (-lambda * t).exp())
        .sum())
}
