//! Euclidean heat kernels `K_T(x, y) = e^{-TH}(x, y)`.
//!
//! Four routes are provided: image sums for the cases with a classical
//! path interpretation, eigensums over a computed spectrum, contour inversion
//! of any resolvent, and the forward transform back to the resolvent
//! (`C_z = (1/2) Int_0^inf e^{-zT} K_T dT` in the resolvent normalisation
//! used by [`crate::resolvent`]).

use std::f64::consts::PI;

use crate::bc::{BoundaryUnitary, Domain, NamedBc};
use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::quadrature::adaptive_gk;
use crate::resolvent::{find_bound_states, BoundStateReport, ResolventFamily, SpectralParameter};
use crate::spectral::{spectral_heat_kernel, spectrum_for_time, Spectrum};

/// Default relative truncation tolerance of image sums.
pub const IMAGE_TOL: f64 = 1e-15;
/// Nodes on each side of the contour midpoint.
pub const CONTOUR_HALF_NODES: usize = 32;

/// Free heat kernel `e^{-r^2/2T} / sqrt(2 pi T)`.
pub fn free_kernel(t: f64, r: f64) -> f64 {
    (-r * r / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// A heat kernel evaluable at any `(T, x, y)`.
pub trait HeatKernel: Sync {
    fn domain(&self) -> Domain;
    fn method(&self) -> &'static str;
    fn eval(&self, t: f64, x: f64, y: f64) -> Result<C64>;
}

fn check_args(domain: Domain, t: f64, x: f64, y: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t}")));
    }
    for p in [x, y] {
        if !domain.contains(p) {
            return Err(Error::InvalidArgument(format!("point {p} is outside the {domain}")));
        }
    }
    Ok(())
}

/// Sum `term(n)` over all integers, expanding outward from 0 until the next
/// pair of terms is below `tol` times the accumulated absolute sum.
fn image_series(tol: f64, term: impl Fn(i64) -> C64) -> C64 {
    let first = term(0);
    let mut total = first;
    let mut scale = first.norm();
    for n in 1..100_000i64 {
        let (a, b) = (term(n), term(-n));
        let size = a.norm() + b.norm();
        total += a + b;
        scale += size;
        // the images peak within |n| <= 1, so only stop past them
        if n >= 2 && size <= tol * scale {
            break;
        }
    }
    total
}

pub fn has_image_form(bc: &NamedBc, domain: Domain) -> bool {
    matches!(
        (bc, domain),
        (NamedBc::Neumann | NamedBc::Dirichlet, _)
            | (NamedBc::Periodic | NamedBc::PseudoPeriodic { .. }, Domain::UnitInterval)
    )
}

/// Image-sum kernel for Neumann and Dirichlet on either domain and for the
/// (pseudo-)periodic conditions on the interval.
///
/// Pseudo-periodic images pick up the phase `e^{i eps n}` per winding, i.e.
/// `K = sum_n e^{i eps n} g_T(x - y - n)`, so that `K(1, y) = e^{i eps} K(0, y)`.
pub fn image_sum_kernel(bc: &NamedBc, domain: Domain, t: f64, x: f64, y: f64, tol: f64) -> Result<C64> {
    if !has_image_form(bc, domain) {
        bc.to_unitary(domain)?;
        return Err(Error::NoImageForm(bc.to_string()));
    }
    check_args(domain, t, x, y)?;
    let g = |r: f64| C64::new(free_kernel(t, r), 0.0);
    let value = match (bc, domain) {
        (NamedBc::Neumann, Domain::HalfLine) => g(x - y) + g(x + y),
        (NamedBc::Dirichlet, Domain::HalfLine) => g(x - y) - g(x + y),
        (NamedBc::Neumann | NamedBc::Dirichlet, Domain::UnitInterval) => {
            let sign = if *bc == NamedBc::Neumann { 1.0 } else { -1.0 };
            image_series(tol, |n| {
                let shift = 2.0 * n as f64;
                g(x - y + shift) + g(x + y + shift) * sign
            })
        }
        (NamedBc::Periodic, _) => image_series(tol, |n| g(x - y - n as f64)),
        (NamedBc::PseudoPeriodic { epsilon }, _) => image_series(tol, |n| {
            C64::from_polar(1.0, epsilon * n as f64) * g(x - y - n as f64)
        }),
        _ => unreachable!("filtered by has_image_form"),
    };
    Ok(value)
}

#[derive(Debug, Clone)]
pub struct ImageSumKernel {
    bc: NamedBc,
    domain: Domain,
    tol: f64,
}

impl ImageSumKernel {
    pub fn new(bc: NamedBc, domain: Domain) -> Result<Self> {
        bc.to_unitary(domain)?;
        if !has_image_form(&bc, domain) {
            return Err(Error::NoImageForm(bc.to_string()));
        }
        Ok(ImageSumKernel {
            bc,
            domain,
            tol: IMAGE_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl HeatKernel for ImageSumKernel {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn method(&self) -> &'static str {
        "images"
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<C64> {
        image_sum_kernel(&self.bc, self.domain, t, x, y, self.tol)
    }
}

/// Eigensum kernel valid for `T >= t_min`.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    spectrum: Spectrum,
    tail_tol: f64,
}

impl SpectralKernel {
    pub fn new(u: &BoundaryUnitary, t_min: f64, tail_tol: f64) -> Result<Self> {
        Ok(SpectralKernel {
            spectrum: spectrum_for_time(u, t_min, tail_tol)?,
            tail_tol,
        })
    }

    pub fn from_spectrum(spectrum: Spectrum, tail_tol: f64) -> Self {
        SpectralKernel { spectrum, tail_tol }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }
}

impl HeatKernel for SpectralKernel {
    fn domain(&self) -> Domain {
        Domain::UnitInterval
    }

    fn method(&self) -> &'static str {
        "spectral"
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<C64> {
        check_args(Domain::UnitInterval, t, x, y)?;
        spectral_heat_kernel(&self.spectrum, t, x, y, self.tail_tol)
    }
}

fn contour_sum(
    family: &ResolventFamily,
    t: f64,
    x: f64,
    y: f64,
    sigma: f64,
    half_nodes: usize,
) -> Result<C64> {
    // Parabola z(u) = sigma + mu (1 + iu)^2, trapezoid in u.
    let m = half_nodes as f64;
    let mu = PI * m / (12.0 * t);
    let h = 3.0 / m;
    let mut acc = C64::new(0.0, 0.0);
    for k in -(half_nodes as i64)..=(half_nodes as i64) {
        let u = k as f64 * h;
        let w = C64::new(1.0, u);
        let z = w * w * mu + sigma;
        let dz = I * w * (2.0 * mu);
        let c = family.at(SpectralParameter::new(z))?.value(x, y);
        acc += c * (z * t).exp() * dz;
    }
    // (1 / 2 pi i) * h * sum, times 2 for the resolvent normalisation
    Ok(acc * h / (I * PI))
}

/// Kernel recovered from a resolvent family by contour inversion.
///
/// The contour is a parabola opening into `Re z < 0`, crossing the real
/// axis to the right of every pole in `bound_states`; the error estimate
/// compares against the rule with half as many nodes.
pub fn inverse_laplace_kernel(
    family: &ResolventFamily,
    t: f64,
    x: f64,
    y: f64,
    bound_states: &BoundStateReport,
) -> Result<C64> {
    check_args(family.domain(), t, x, y)?;
    let sigma = bound_states.max_pole().unwrap_or(0.0).max(0.0) + 1.0;
    let fine = contour_sum(family, t, x, y, sigma, CONTOUR_HALF_NODES)?;
    let coarse = contour_sum(family, t, x, y, sigma, CONTOUR_HALF_NODES / 2)?;
    let estimate = (fine - coarse).norm();
    if estimate > 1e-5 * fine.norm() + 1e-10 * free_kernel(t, 0.0) {
        return Err(Error::ContourFailure { estimate });
    }
    Ok(fine)
}

#[derive(Debug, Clone)]
pub struct InverseLaplaceKernel {
    family: ResolventFamily,
    bound_states: BoundStateReport,
}

impl InverseLaplaceKernel {
    /// Bound states are searched up to binding constant 50.
    pub fn new(family: ResolventFamily) -> Result<Self> {
        let bound_states = find_bound_states(&family.unitary(), 50.0)?;
        Ok(InverseLaplaceKernel {
            family,
            bound_states,
        })
    }

    pub fn bound_states(&self) -> &BoundStateReport {
        &self.bound_states
    }
}

impl HeatKernel for InverseLaplaceKernel {
    fn domain(&self) -> Domain {
        self.family.domain()
    }

    fn method(&self) -> &'static str {
        "laplace"
    }

    fn eval(&self, t: f64, x: f64, y: f64) -> Result<C64> {
        inverse_laplace_kernel(&self.family, t, x, y, &self.bound_states)
    }
}

/// `(1/2) Int_0^inf e^{-zT} K_T(x, y) dT`, to be compared with `C_z(x, y)`.
///
/// `[0, 1]` is integrated in `T = u^2` to absorb the `T^{-1/2}` behaviour
/// of the kernel; the tail is summed over doubling intervals.
pub fn forward_laplace_check(kernel: &dyn HeatKernel, z: C64, x: f64, y: f64) -> Result<C64> {
    let integrand = |t: f64| -> Result<C64> { Ok((-z * t).exp() * kernel.eval(t, x, y)?) };
    let head = adaptive_gk(
        |u: f64| Ok::<_, Error>(integrand(u * u)? * (2.0 * u)),
        0.0,
        1.0,
        1e-15,
        1e-13,
    )?;
    let mut total = head.value;
    let mut last = f64::INFINITY;
    let mut growth = 0;
    let mut lo = 1.0;
    while lo < (1u64 << 20) as f64 {
        let piece = adaptive_gk(integrand, lo, 2.0 * lo, 1e-15, 1e-13)?.value;
        total += piece;
        let size = piece.norm();
        if size <= 1e-14 * total.norm() || size == 0.0 {
            return Ok(total * 0.5);
        }
        growth = if size >= last { growth + 1 } else { 0 };
        if growth >= 3 {
            break;
        }
        last = size;
        lo *= 2.0;
    }
    Err(Error::DivergentIntegral { z })
}

/// A wave function sampled on a uniform grid over the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub domain: Domain,
    pub samples: Vec<C64>,
}

/// Default grid size of wave packets.
pub const PACKET_POINTS: usize = 513;

impl WavePacket {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        if samples.len() < 3 || samples.len() % 2 == 0 {
            return Err(Error::InvalidArgument(
                "packets need an odd number (>= 3) of grid points".into(),
            ));
        }
        Ok(WavePacket {
            domain: Domain::UnitInterval,
            samples,
        })
    }

    pub fn from_fn(points: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        let h = 1.0 / (points.max(2) - 1) as f64;
        WavePacket::new((0..points).map(|i| f(i as f64 * h)).collect())
    }

    /// Normalised Gaussian `exp(-(x - centre)^2 / (4 width^2))`.
    pub fn gaussian(centre: f64, width: f64, points: usize) -> Result<Self> {
        let p = WavePacket::from_fn(points, |x| {
            C64::new((-(x - centre).powi(2) / (4.0 * width * width)).exp(), 0.0)
        })?;
        let n = p.norm();
        Ok(p.scaled(1.0 / n))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.len()).map(|i| i as f64 * h).collect()
    }

    fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    // Simpson weights on the odd-sized grid
    fn weight(&self, i: usize) -> f64 {
        let n = self.len();
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        w * self.step() / 3.0
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &WavePacket) -> C64 {
        (0..self.len())
            .map(|i| self.samples[i].conj() * other.samples[i] * self.weight(i))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Integral of the wave function over the interval.
    pub fn integral(&self) -> C64 {
        (0..self.len()).map(|i| self.samples[i] * self.weight(i)).sum()
    }

    pub fn scaled(&self, c: f64) -> WavePacket {
        WavePacket {
            domain: self.domain,
            samples: self.samples.iter().map(|v| v * c).collect(),
        }
    }

    pub fn distance(&self, other: &WavePacket) -> f64 {
        let diff = WavePacket {
            domain: self.domain,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect(),
        };
        diff.norm()
    }
}

/// Result of evolving a packet over the computed modes.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub packet: WavePacket,
    /// Bound on the contribution of modes beyond the computed spectrum:
    /// `e^{-lambda_max T} * |psi - P psi|`.
    pub truncation_bound: f64,
}

/// `psi_T = sum_n e^{-lambda_n T} <psi_n, psi> psi_n` on the packet grid.
///
/// Fails with `InsufficientSpectrum` when the truncation bound exceeds
/// `tol * |psi|`.
pub fn evolve_packet(psi: &WavePacket, spec: &Spectrum, t: f64, tol: f64) -> Result<Evolution> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("T must be non-negative, got {t}")));
    }
    let grid = psi.grid();
    let mut projected = vec![C64::new(0.0, 0.0); psi.len()];
    let mut evolved = vec![C64::new(0.0, 0.0); psi.len()];
    for (lambda, f) in spec.eigenfunctions() {
        let mode = WavePacket {
            domain: psi.domain,
            samples: grid.iter().map(|&x| f.eval(x)).collect(),
        };
        let c = mode.inner(psi);
        let decay = (-lambda * t).exp();
        for (i, m) in mode.samples.iter().enumerate() {
            projected[i] += c * m;
            evolved[i] += c * decay * m;
        }
    }
    let remainder = psi.distance(&WavePacket {
        domain: psi.domain,
        samples: projected,
    });
    let tail = (-spec.max_eigenvalue() * t).exp();
    let truncation_bound = tail * remainder;
    if truncation_bound > tol * psi.norm() {
        return Err(Error::InsufficientSpectrum {
            tail: truncation_bound,
            tol: tol * psi.norm(),
        });
    }
    Ok(Evolution {
        packet: WavePacket {
            domain: psi.domain,
            samples: evolved,
        },
        truncation_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_spectrum;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn half_line_neumann_at_origin() {
        let k = image_sum_kernel(&NamedBc::Neumann, Domain::HalfLine, 0.5, 0.0, 0.0, IMAGE_TOL).unwrap();
        assert!((k.re - 2.0 / PI.sqrt()).abs() < 1e-15);
        assert!((k.re - 1.128379).abs() < 1e-6);
    }

    #[test]
    fn half_line_dirichlet_vanishes_on_boundary() {
        for (t, y) in [(0.1, 0.3), (2.0, 5.0)] {
            let k = image_sum_kernel(&NamedBc::Dirichlet, Domain::HalfLine, t, 0.0, y, IMAGE_TOL).unwrap();
            assert_eq!(k.norm(), 0.0);
        }
    }

    #[test]
    fn zero_phase_is_periodic() {
        for (x, y, t) in [(0.1, 0.9, 0.05), (0.5, 0.2, 1.3)] {
            let a = image_sum_kernel(&NamedBc::PseudoPeriodic { epsilon: 0.0 }, Domain::UnitInterval, t, x, y, IMAGE_TOL).unwrap();
            let b = image_sum_kernel(&NamedBc::Periodic, Domain::UnitInterval, t, x, y, IMAGE_TOL).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn generic_conditions_have_no_images() {
        let err = image_sum_kernel(&NamedBc::RobinHalfLine { alpha: 1.0 }, Domain::HalfLine, 1.0, 0.1, 0.2, IMAGE_TOL);
        assert!(matches!(err, Err(Error::NoImageForm(_))));
        let err = image_sum_kernel(&NamedBc::Periodic, Domain::HalfLine, 1.0, 0.1, 0.2, IMAGE_TOL);
        assert!(matches!(err, Err(Error::IncompatibleDomain { .. })));
    }

    #[test]
    fn pseudo_periodic_images_carry_the_boundary_phase() {
        let eps = 0.8;
        let bc = NamedBc::PseudoPeriodic { epsilon: eps };
        let k0 = image_sum_kernel(&bc, Domain::UnitInterval, 0.3, 0.0, 0.4, IMAGE_TOL).unwrap();
        let k1 = image_sum_kernel(&bc, Domain::UnitInterval, 0.3, 1.0, 0.4, IMAGE_TOL).unwrap();
        assert!((k1 - k0 * C64::from_polar(1.0, eps)).norm() < 1e-14);
    }

    #[test]
    fn neumann_inverse_laplace_at_origin() {
        let family = ResolventFamily::closed_form(NamedBc::Neumann, Domain::HalfLine).unwrap();
        let k = inverse_laplace_kernel(&family, 0.5, 0.0, 0.0, &BoundStateReport::default()).unwrap();
        assert!((k - c(2.0 / PI.sqrt())).norm() < 1e-6 * 1.13);
    }

    #[test]
    fn dirichlet_interval_inverse_laplace_matches_images() {
        let family = ResolventFamily::closed_form(NamedBc::Dirichlet, Domain::UnitInterval).unwrap();
        let k = inverse_laplace_kernel(&family, 0.2, 0.3, 0.7, &BoundStateReport::default()).unwrap();
        let want = image_sum_kernel(&NamedBc::Dirichlet, Domain::UnitInterval, 0.2, 0.3, 0.7, IMAGE_TOL).unwrap();
        assert!((k - want).norm() < 1e-6 * want.norm());
    }

    #[test]
    fn forward_transform_of_neumann_half_line() {
        let kernel = ImageSumKernel::new(NamedBc::Neumann, Domain::HalfLine).unwrap();
        let v = forward_laplace_check(&kernel, c(0.5), 0.0, 0.0).unwrap();
        assert!((v - c(1.0)).norm() < 1e-9);
    }

    #[test]
    fn forward_transform_of_dirichlet_on_boundary_is_zero() {
        let kernel = ImageSumKernel::new(NamedBc::Dirichlet, Domain::HalfLine).unwrap();
        let v = forward_laplace_check(&kernel, c(0.7), 0.0, 0.4).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn forward_transform_reports_divergence() {
        let kernel = ImageSumKernel::new(NamedBc::Periodic, Domain::UnitInterval).unwrap();
        let err = forward_laplace_check(&kernel, c(-0.5), 0.2, 0.4).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
    }

    #[test]
    fn eigenfunction_evolves_by_its_exponential() {
        let u = NamedBc::QuasiPeriodic { alpha: 1.3 }.to_unitary(Domain::UnitInterval).unwrap();
        let spec = solve_spectrum(&u, 30).unwrap();
        let f = spec.pairs[0].eigenfunctions[0];
        let lambda = spec.pairs[0].eigenvalue;
        let psi = WavePacket::from_fn(PACKET_POINTS, |x| f.eval(x)).unwrap();
        let out = evolve_packet(&psi, &spec, 0.7, 1e-10).unwrap();
        assert!(out.packet.distance(&psi.scaled((-lambda * 0.7).exp())) < 1e-10);
    }

    #[test]
    fn periodic_packet_relaxes_to_its_mean() {
        let u = NamedBc::Periodic.to_unitary(Domain::UnitInterval).unwrap();
        let spec = solve_spectrum(&u, 41).unwrap();
        let psi = WavePacket::gaussian(0.3, 0.05, PACKET_POINTS).unwrap();
        let out = evolve_packet(&psi, &spec, 3.0, 1e-12).unwrap();
        let mean = psi.integral();
        for v in &out.packet.samples {
            assert!((v - mean).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_time_reproduces_packet_within_bound() {
        let u = NamedBc::Dirichlet.to_unitary(Domain::UnitInterval).unwrap();
        let spec = solve_spectrum(&u, 60).unwrap();
        let psi = WavePacket::gaussian(0.5, 0.05, PACKET_POINTS).unwrap();
        let out = evolve_packet(&psi, &spec, 0.0, 1e-3).unwrap();
        assert!(out.packet.distance(&psi) <= out.truncation_bound * (1.0 + 1e-9) + 1e-14);
        assert!(out.truncation_bound < 1e-6);
    }

    #[test]
    fn evolution_does_not_increase_the_norm() {
        let u = NamedBc::DeltaPoint { a: 3.0 }.to_unitary(Domain::UnitInterval).unwrap();
        let spec = solve_spectrum(&u, 40).unwrap();
        let psi = WavePacket::gaussian(0.2, 0.1, PACKET_POINTS).unwrap();
        let mut last = f64::INFINITY;
        for t in [0.01, 0.05, 0.2, 1.0] {
            let n = evolve_packet(&psi, &spec, t, 1e-8).unwrap().packet.norm();
            assert!(n <= last + 1e-12);
            last = n;
        }
    }
}
