//! Resolvent kernels `C_z(x, y)` of self-adjoint extensions.
//!
//! Kernels are normalised as the Green's function of `s^2 - d^2/dx^2` with
//! `s = sqrt(2 z)`, i.e. `C_z = (1/2) (z + H)^{-1}`. In this normalisation a
//! source placed on the boundary has unit outward normal derivative, which
//! is what makes the Krein correction
//!
//! ```text
//!     C^U = C^0 - C^0(., w) R C^0(w', .),   R = ((I - U) C^0_b - i (I + U))^{-1} (I - U)
//! ```
//!
//! hold with no extra factors. The heat kernel is recovered with
//! `K_T = 2 * (1 / 2 pi i) * Int C_z e^{zT} dz`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::bc::{BoundaryData, BoundaryUnitary, Domain, NamedBc};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, golden_section, singular_values, C64, I};

/// Spectrum proximity below which evaluation is refused.
pub const POLE_TOL: f64 = 1e-10;
/// Largest acceptable condition number of the Krein matrix.
pub const KREIN_COND_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter(C64);

impl SpectralParameter {
    pub fn new(z: C64) -> Self {
        SpectralParameter(z)
    }

    pub fn real(z: f64) -> Self {
        SpectralParameter(C64::new(z, 0.0))
    }

    pub fn z(&self) -> C64 {
        self.0
    }

    /// `sqrt(2z)` on the principal branch (`Re s >= 0`).
    pub fn s(&self) -> C64 {
        (self.0 * 2.0).sqrt()
    }
}

impl From<C64> for SpectralParameter {
    fn from(z: C64) -> Self {
        SpectralParameter(z)
    }
}

impl From<f64> for SpectralParameter {
    fn from(z: f64) -> Self {
        SpectralParameter::real(z)
    }
}

#[derive(Debug, Clone)]
enum Rule {
    /// `(1/2s) e^{-s|x-y|} + B e^{-s(x+y)}` on the half-line.
    HalfLineImage { coef: C64 },
    /// Neumann (+1) / Dirichlet (-1) reflections on the interval.
    IntervalReflect { sign: f64 },
    /// Phase-twisted periodic images on the interval.
    Twisted { epsilon: f64 },
    Krein { correction: DMatrix<C64> },
}

/// A resolvent kernel frozen at one value of the spectral parameter.
#[derive(Debug, Clone)]
pub struct ResolventEval {
    domain: Domain,
    unitary: BoundaryUnitary,
    z: SpectralParameter,
    s: C64,
    rule: Rule,
}

/// Sign of d|x - y|/dx, taking the interior side when x = y sits on the boundary.
fn dist_sign(domain: Domain, x: f64, y: f64) -> f64 {
    if x > y {
        1.0
    } else if x < y {
        -1.0
    } else {
        domain.inward_sign(x)
    }
}

fn ex(s: C64, a: f64) -> C64 {
    (-s * a).exp()
}

fn neumann_background(domain: Domain, s: C64, x: f64, y: f64) -> (C64, C64) {
    match domain {
        Domain::HalfLine => half_line_image(s, s.inv() * 0.5, x, y),
        Domain::UnitInterval => interval_reflect(s, 1.0, x, y),
    }
}

fn half_line_image(s: C64, coef: C64, x: f64, y: f64) -> (C64, C64) {
    let sigma = dist_sign(Domain::HalfLine, x, y);
    let direct = ex(s, (x - y).abs());
    let image = ex(s, x + y);
    let value = direct / (s * 2.0) + coef * image;
    let dx = -direct * (0.5 * sigma) - s * coef * image;
    (value, dx)
}

fn interval_reflect(s: C64, sign: f64, x: f64, y: f64) -> (C64, C64) {
    let sigma = dist_sign(Domain::UnitInterval, x, y);
    let denom = C64::new(1.0, 0.0) - ex(s, 2.0);
    let (p, d) = (x + y, (x - y).abs());
    let (ep, ep2, ed, ed2) = (ex(s, p), ex(s, 2.0 - p), ex(s, d), ex(s, 2.0 - d));
    let value = ((ep + ep2) * sign + ed + ed2) / (s * 2.0 * denom);
    let dx = ((ep2 - ep) * sign + (ed2 - ed) * sigma) / (denom * 2.0);
    (value, dx)
}

fn twisted(s: C64, epsilon: f64, x: f64, y: f64) -> (C64, C64) {
    let r = x - y;
    let sigma = dist_sign(Domain::UnitInterval, x, y);
    let fwd = C64::from_polar(1.0, epsilon);
    let bwd = fwd.conj();
    let one = C64::new(1.0, 0.0);
    let a = fwd / (one - (-s).exp() * fwd);
    let b = bwd / (one - (-s).exp() * bwd);
    let (e0, e1, e2) = (ex(s, r.abs()), ex(s, 1.0 - r), ex(s, 1.0 + r));
    let value = (e0 + e1 * a + e2 * b) / (s * 2.0);
    let dx = (-e0 * sigma + e1 * a - e2 * b) * 0.5;
    (value, dx)
}

/// Image coefficient of the Robin half-line resolvent.
fn robin_coefficient(alpha: f64, z: C64, s: C64) -> C64 {
    let from_pi = (alpha - PI).rem_euclid(2.0 * PI);
    if from_pi.min(2.0 * PI - from_pi) < 0.1 {
        // cot form: finite at alpha = pi
        let half = alpha / 2.0;
        let cot = half.cos() / half.sin();
        (s * cot - 1.0) / (s * 2.0 * (s * cot + 1.0))
    } else {
        let t = (alpha / 2.0).tan();
        (z * 2.0 - s * t) / (z * 4.0 * (s + t))
    }
}

/// Distance from z to (-inf, 0], the continuous spectrum of -H on the half-line.
fn cut_distance(z: C64) -> f64 {
    if z.re <= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

fn check_distance(z: C64, distance: f64) -> Result<()> {
    if distance < POLE_TOL || !distance.is_finite() {
        Err(Error::PoleProximity { z, distance })
    } else {
        Ok(())
    }
}

/// Distance from z to the poles {-(2 pi n / period + shift)^2 / 2 : n in Z}.
fn lattice_pole_distance(z: C64, period_k: f64, shift: f64) -> f64 {
    // poles at z = -k^2/2 with k = period_k * n + shift
    let k = (2.0 * (-z.re).max(0.0)).sqrt();
    let mut best = f64::INFINITY;
    for target in [k, -k] {
        let n0 = ((target - shift) / period_k).round() as i64;
        for n in n0 - 1..=n0 + 1 {
            let kn = period_k * n as f64 + shift;
            best = best.min((z + kn * kn / 2.0).norm());
        }
    }
    best
}

fn neumann_pole_distance(domain: Domain, z: C64) -> f64 {
    match domain {
        Domain::HalfLine => cut_distance(z),
        Domain::UnitInterval => lattice_pole_distance(z, PI, 0.0),
    }
}

/// `C^0_z(w, w')` over boundary points.
pub fn background_boundary_matrix(domain: Domain, s: C64) -> DMatrix<C64> {
    let pts = domain.boundary_points();
    DMatrix::from_fn(pts.len(), pts.len(), |i, j| {
        neumann_background(domain, s, pts[i], pts[j]).0
    })
}

/// The Krein matrix `(I - U) C^0_b - i (I + U)` at z (no pole checks).
pub fn krein_matrix(u: &BoundaryUnitary, z: SpectralParameter) -> DMatrix<C64> {
    let (minus, plus) = u.projector_pair();
    let c0 = background_boundary_matrix(u.domain(), z.s());
    &minus * c0 - plus * I
}

/// `R^U_z = ((I - U) C^0_b - i (I + U))^{-1} (I - U)`.
pub fn krein_correction(u: &BoundaryUnitary, z: SpectralParameter) -> Result<DMatrix<C64>> {
    check_distance(z.z(), neumann_pole_distance(u.domain(), z.z()))?;
    let k = krein_matrix(u, z);
    // Relative to the size of its two terms, so a vanishing 1x1 matrix
    // counts as singular too.
    let (minus, plus) = u.projector_pair();
    let c0 = background_boundary_matrix(u.domain(), z.s());
    let scale = (&minus * c0).norm() + plus.norm();
    let smallest = singular_values(&k).last().copied().unwrap_or(0.0);
    let condition = condition_number(&k).max(scale / smallest);
    if !(condition < KREIN_COND_MAX) {
        return Err(Error::SingularKreinMatrix {
            z: z.z(),
            condition,
        });
    }
    let inv = k.try_inverse().ok_or(Error::SingularKreinMatrix {
        z: z.z(),
        condition,
    })?;
    let (minus, _) = u.projector_pair();
    Ok(inv * minus)
}

/// Neumann background resolvent `C^0_z`.
pub fn background_resolvent(domain: Domain, z: impl Into<SpectralParameter>) -> Result<ResolventEval> {
    let z = z.into();
    check_distance(z.z(), neumann_pole_distance(domain, z.z()))?;
    let s = z.s();
    let rule = match domain {
        Domain::HalfLine => Rule::HalfLineImage {
            coef: s.inv() * 0.5,
        },
        Domain::UnitInterval => Rule::IntervalReflect { sign: 1.0 },
    };
    Ok(ResolventEval {
        domain,
        unitary: BoundaryUnitary::identity(domain),
        z,
        s,
        rule,
    })
}

/// Resolvent of the extension `U` built from the Neumann background.
pub fn krein_resolvent(u: &BoundaryUnitary, z: impl Into<SpectralParameter>) -> Result<ResolventEval> {
    let z = z.into();
    let correction = krein_correction(u, z)?;
    Ok(ResolventEval {
        domain: u.domain(),
        unitary: u.clone(),
        z,
        s: z.s(),
        rule: Rule::Krein { correction },
    })
}

pub fn has_closed_form(bc: &NamedBc) -> bool {
    matches!(
        bc,
        NamedBc::Neumann
            | NamedBc::Dirichlet
            | NamedBc::RobinHalfLine { .. }
            | NamedBc::Periodic
            | NamedBc::PseudoPeriodic { .. }
    )
}

/// Closed-form resolvent for the named conditions that have one.
pub fn closed_form_resolvent(
    bc: &NamedBc,
    domain: Domain,
    z: impl Into<SpectralParameter>,
) -> Result<ResolventEval> {
    let z = z.into();
    if !has_closed_form(bc) {
        return Err(Error::NoClosedForm(bc.to_string()));
    }
    let unitary = bc.to_unitary(domain)?;
    let (zv, s) = (z.z(), z.s());
    let rule = match (bc, domain) {
        (NamedBc::Neumann, Domain::HalfLine) => {
            check_distance(zv, cut_distance(zv))?;
            Rule::HalfLineImage { coef: s.inv() * 0.5 }
        }
        (NamedBc::Dirichlet, Domain::HalfLine) => {
            check_distance(zv, cut_distance(zv))?;
            Rule::HalfLineImage { coef: -s.inv() * 0.5 }
        }
        (NamedBc::RobinHalfLine { alpha }, Domain::HalfLine) => {
            let mut distance = cut_distance(zv);
            let t = (alpha / 2.0).tan();
            if t < 0.0 && t.is_finite() {
                distance = distance.min((zv - t * t / 2.0).norm());
            }
            check_distance(zv, distance)?;
            Rule::HalfLineImage {
                coef: robin_coefficient(*alpha, zv, s),
            }
        }
        (NamedBc::Neumann, Domain::UnitInterval) => {
            check_distance(zv, lattice_pole_distance(zv, PI, 0.0))?;
            Rule::IntervalReflect { sign: 1.0 }
        }
        (NamedBc::Dirichlet, Domain::UnitInterval) => {
            check_distance(zv, lattice_pole_distance(zv, PI, 0.0))?;
            Rule::IntervalReflect { sign: -1.0 }
        }
        (NamedBc::Periodic, Domain::UnitInterval) => {
            check_distance(zv, lattice_pole_distance(zv, 2.0 * PI, 0.0))?;
            Rule::Twisted { epsilon: 0.0 }
        }
        (NamedBc::PseudoPeriodic { epsilon }, Domain::UnitInterval) => {
            check_distance(zv, lattice_pole_distance(zv, 2.0 * PI, *epsilon))?;
            Rule::Twisted { epsilon: *epsilon }
        }
        _ => unreachable!("to_unitary rejected the domain"),
    };
    Ok(ResolventEval {
        domain,
        unitary,
        z,
        s,
        rule,
    })
}

impl ResolventEval {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn unitary(&self) -> &BoundaryUnitary {
        &self.unitary
    }

    pub fn z(&self) -> SpectralParameter {
        self.z
    }

    fn eval_pair(&self, x: f64, y: f64) -> (C64, C64) {
        let s = self.s;
        match &self.rule {
            Rule::HalfLineImage { coef } => half_line_image(s, *coef, x, y),
            Rule::IntervalReflect { sign } => interval_reflect(s, *sign, x, y),
            Rule::Twisted { epsilon } => twisted(s, *epsilon, x, y),
            Rule::Krein { correction } => {
                let (mut value, mut dx) = neumann_background(self.domain, s, x, y);
                let pts = self.domain.boundary_points();
                for (i, &w) in pts.iter().enumerate() {
                    let (left, left_dx) = neumann_background(self.domain, s, x, w);
                    for (j, &w2) in pts.iter().enumerate() {
                        let right = neumann_background(self.domain, s, w2, y).0;
                        let r = correction[(i, j)];
                        value -= left * r * right;
                        dx -= left_dx * r * right;
                    }
                }
                (value, dx)
            }
        }
    }

    pub fn value(&self, x: f64, y: f64) -> C64 {
        self.eval_pair(x, y).0
    }

    /// `d/dx C_z(x, y)`; at x = y the mean of the one-sided slopes in the
    /// interior, the interior-side slope on the boundary.
    pub fn dx(&self, x: f64, y: f64) -> C64 {
        self.eval_pair(x, y).1
    }

    /// Boundary data of the column `x -> C_z(x, y)`.
    pub fn boundary_data(&self, y: f64) -> BoundaryData {
        let pts = self.domain.boundary_points();
        let values: Vec<C64> = pts.iter().map(|&w| self.value(w, y)).collect();
        let derivs: Vec<C64> = pts.iter().map(|&w| self.dx(w, y)).collect();
        BoundaryData::from_function(self.domain, &values, &derivs)
            .expect("sizes match the domain")
    }
}

/// A resolvent available at every spectral parameter.
#[derive(Debug, Clone)]
pub enum ResolventFamily {
    ClosedForm { bc: NamedBc, domain: Domain },
    Krein(BoundaryUnitary),
}

impl ResolventFamily {
    pub fn closed_form(bc: NamedBc, domain: Domain) -> Result<Self> {
        if !has_closed_form(&bc) {
            return Err(Error::NoClosedForm(bc.to_string()));
        }
        bc.to_unitary(domain)?;
        Ok(ResolventFamily::ClosedForm { bc, domain })
    }

    pub fn krein(u: BoundaryUnitary) -> Self {
        ResolventFamily::Krein(u)
    }

    pub fn domain(&self) -> Domain {
        match self {
            ResolventFamily::ClosedForm { domain, .. } => *domain,
            ResolventFamily::Krein(u) => u.domain(),
        }
    }

    pub fn unitary(&self) -> BoundaryUnitary {
        match self {
            ResolventFamily::ClosedForm { bc, domain } => {
                bc.to_unitary(*domain).expect("validated on construction")
            }
            ResolventFamily::Krein(u) => u.clone(),
        }
    }

    pub fn at(&self, z: impl Into<SpectralParameter>) -> Result<ResolventEval> {
        match self {
            ResolventFamily::ClosedForm { bc, domain } => closed_form_resolvent(bc, *domain, z),
            ResolventFamily::Krein(u) => krein_resolvent(u, z),
        }
    }
}

/// Positive poles `z* = kappa^2 / 2` of a resolvent, i.e. bound states at `E = -z*`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundStateReport {
    pub poles: Vec<f64>,
    pub kappas: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl BoundStateReport {
    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn max_pole(&self) -> Option<f64> {
        self.poles.iter().copied().reduce(f64::max)
    }

    pub fn energies(&self) -> Vec<f64> {
        self.poles.iter().map(|p| -p).collect()
    }

    fn push(&mut self, kappa: f64, multiplicity: usize) {
        self.kappas.push(kappa);
        self.poles.push(kappa * kappa / 2.0);
        self.multiplicities.push(multiplicity);
    }
}

/// Bound states with binding constant `kappa` in (0, search_max].
///
/// On the half-line the Krein determinant is scanned on a grid of
/// `10 * search_max` points and each local minimum is refined by
/// golden-section search; accepted roots have `|det| < 1e-10`. On the
/// interval the negative part of the eigenphase count used by the
/// spectral solver is reused, which also resolves near-degenerate pairs.
pub fn find_bound_states(u: &BoundaryUnitary, search_max: f64) -> Result<BoundStateReport> {
    if !(search_max > 0.0) || !search_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "search_max must be positive, got {search_max}"
        )));
    }
    let mut report = BoundStateReport::default();
    match u.domain() {
        Domain::HalfLine => {
            let det = |kappa: f64| {
                krein_matrix(u, SpectralParameter::real(kappa * kappa / 2.0))
                    .determinant()
                    .norm()
            };
            let n = ((10.0 * search_max).ceil() as usize).max(2);
            let grid: Vec<f64> = (1..=n).map(|i| search_max * i as f64 / n as f64).collect();
            let vals: Vec<f64> = grid.iter().map(|&k| det(k)).collect();
            for i in 0..n {
                let left_ok = i == 0 || vals[i] <= vals[i - 1];
                let right_ok = i + 1 == n || vals[i] <= vals[i + 1];
                if !(left_ok && right_ok) {
                    continue;
                }
                let lo = if i == 0 { grid[0] * 1e-6 } else { grid[i - 1] };
                let hi = if i + 1 == n { grid[i] } else { grid[i + 1] };
                let (kappa, residual) = golden_section(lo, hi, det);
                if residual < 1e-10 && report.kappas.iter().all(|k| (k - kappa).abs() > 1e-8) {
                    report.push(kappa, 1);
                }
            }
        }
        Domain::UnitInterval => {
            for (energy, mult) in crate::spectral::negative_spectrum(u, search_max)? {
                report.push((-2.0 * energy).sqrt(), mult);
            }
        }
    }
    Ok(report)
}

pub fn find_bound_states_named(bc: &NamedBc, domain: Domain, search_max: f64) -> Result<BoundStateReport> {
    find_bound_states(&bc.to_unitary(domain)?, search_max)
}
