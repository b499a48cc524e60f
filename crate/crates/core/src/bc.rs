//! Domains, boundary unitaries and the catalog of named boundary conditions.
//!
//! A self-adjoint extension of `H = -1/2 d^2/dx^2` is fixed by a unitary
//! matrix `U` acting on boundary data, through
//!
//! ```text
//!     phi - i phidot = U (phi + i phidot)
//! ```
//!
//! where `phi` collects the boundary values of the wave function and
//! `phidot` its outward normal derivatives: `phidot(0) = -psi'(0)` and
//! `phidot(1) = +psi'(1)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UNITARITY_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    HalfLine,
    #[serde(rename = "interval", alias = "unitinterval")]
    UnitInterval,
}

impl Domain {
    pub fn boundary_points(self) -> &'static [f64] {
        match self {
            Domain::HalfLine => &[0.0],
            Domain::UnitInterval => &[0.0, 1.0],
        }
    }

    pub fn boundary_count(self) -> usize {
        self.boundary_points().len()
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::HalfLine => x >= 0.0 && x.is_finite(),
            Domain::UnitInterval => (0.0..=1.0).contains(&x),
        }
    }

    pub fn on_boundary(self, x: f64) -> bool {
        self.boundary_points().iter().any(|&b| b == x)
    }

    /// Sign of the inward direction at boundary point `x`, zero in the interior.
    pub(crate) fn inward_sign(self, x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else if self == Domain::UnitInterval && x == 1.0 {
            -1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::HalfLine => "halfline",
            Domain::UnitInterval => "interval",
        })
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "halfline" | "half-line" => Ok(Domain::HalfLine),
            "interval" | "unit-interval" => Ok(Domain::UnitInterval),
            _ => Err(Error::Parse {
                token: s.to_string(),
                reason: "unknown domain".into(),
                example: "halfline | interval".into(),
            }),
        }
    }
}

/// Unitary matrix on boundary data labelling a self-adjoint extension.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryUnitary {
    domain: Domain,
    matrix: DMatrix<Complex64>,
}

impl BoundaryUnitary {
    pub fn new(domain: Domain, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = domain.boundary_count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = unitarity_deviation(&matrix);
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(BoundaryUnitary { domain, matrix })
    }

    pub fn identity(domain: Domain) -> Self {
        let n = domain.boundary_count();
        BoundaryUnitary {
            domain,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    /// Group product `self * other`; both must live on the same domain.
    pub fn compose(&self, other: &BoundaryUnitary) -> Result<BoundaryUnitary> {
        if self.domain != other.domain {
            return Err(Error::InvalidArgument(format!(
                "cannot compose boundary unitaries on {} and {}",
                self.domain, other.domain
            )));
        }
        BoundaryUnitary::new(self.domain, &self.matrix * &other.matrix)
    }

    /// True when `U` is a real matrix, so kernels of the extension are real.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|c| c.im.abs() <= UNITARITY_TOL)
    }

    /// `(I - U, I + U)`.
    pub(crate) fn projector_pair(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (&id - &self.matrix, &id + &self.matrix)
    }
}

/// Max-entry deviation of `U U^†` from the identity.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let prod = m * m.adjoint();
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (prod[(i, j)] - target).norm();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    worst
}

/// Boundary values and outward normal derivatives of a wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub domain: Domain,
    pub value: Vec<Complex64>,
    pub normal_derivative: Vec<Complex64>,
}

impl BoundaryData {
    pub fn new(
        domain: Domain,
        value: Vec<Complex64>,
        normal_derivative: Vec<Complex64>,
    ) -> Result<Self> {
        let n = domain.boundary_count();
        if value.len() != n || normal_derivative.len() != n {
            return Err(Error::InvalidArgument(format!(
                "boundary data on the {domain} needs {n} entries per vector"
            )));
        }
        Ok(BoundaryData {
            domain,
            value,
            normal_derivative,
        })
    }

    /// Boundary data of a function given its values and x-derivatives at the
    /// boundary points, applying the outward-normal sign convention.
    pub fn from_function(
        domain: Domain,
        value: &[Complex64],
        derivative: &[Complex64],
    ) -> Result<Self> {
        let normal = domain
            .boundary_points()
            .iter()
            .zip(derivative)
            .map(|(&p, &d)| d * -domain.inward_sign(p))
            .collect();
        BoundaryData::new(domain, value.to_vec(), normal)
    }

    pub fn scaled(&self, c: Complex64) -> BoundaryData {
        BoundaryData {
            domain: self.domain,
            value: self.value.iter().map(|v| v * c).collect(),
            normal_derivative: self.normal_derivative.iter().map(|v| v * c).collect(),
        }
    }
}

/// `max_i |(phi - i phidot) - U (phi + i phidot)|_i`.
pub fn bc_residual(u: &BoundaryUnitary, data: &BoundaryData) -> Result<f64> {
    if u.domain() != data.domain {
        return Err(Error::InvalidArgument(format!(
            "boundary unitary lives on the {} but data on the {}",
            u.domain(),
            data.domain
        )));
    }
    let n = u.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        let lhs = data.value[i] - I * data.normal_derivative[i];
        let mut rhs = Complex64::new(0.0, 0.0);
        for j in 0..n {
            rhs += u.entry(i, j) * (data.value[j] + I * data.normal_derivative[j]);
        }
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

pub fn satisfies_bc(u: &BoundaryUnitary, data: &BoundaryData, tol: f64) -> Result<bool> {
    Ok(bc_residual(u, data)? <= tol)
}

/// Boundary conditions with names, plus arbitrary unitaries.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedBc {
    Neumann,
    Dirichlet,
    /// `psi'(0) = tan(alpha/2) psi(0)`, `U = e^{i alpha}`.
    RobinHalfLine { alpha: f64 },
    Periodic,
    /// `psi(1) = e^{i eps} psi(0)`, `psi'(1) = e^{i eps} psi'(0)`.
    PseudoPeriodic { epsilon: f64 },
    QuasiPeriodic { alpha: f64 },
    /// Periodic circle with a point defect of strength `a` at x = 0 = 1.
    DeltaPoint { a: f64 },
    /// Row-major entries of the unitary (1 or 4 entries).
    Custom(Vec<Complex64>),
}

impl NamedBc {
    /// Canonical catalog with representative parameters.
    pub fn catalog() -> Vec<NamedBc> {
        vec![
            NamedBc::Neumann,
            NamedBc::Dirichlet,
            NamedBc::RobinHalfLine { alpha: PI / 2.0 },
            NamedBc::Periodic,
            NamedBc::PseudoPeriodic { epsilon: PI / 3.0 },
            NamedBc::QuasiPeriodic { alpha: PI / 3.0 },
            NamedBc::DeltaPoint { a: 1.0 },
        ]
    }

    pub fn supports(&self, domain: Domain) -> bool {
        match self {
            NamedBc::Neumann | NamedBc::Dirichlet => true,
            NamedBc::RobinHalfLine { .. } => domain == Domain::HalfLine,
            NamedBc::Periodic
            | NamedBc::PseudoPeriodic { .. }
            | NamedBc::QuasiPeriodic { .. }
            | NamedBc::DeltaPoint { .. } => domain == Domain::UnitInterval,
            NamedBc::Custom(entries) => entries.len() == domain.boundary_count().pow(2),
        }
    }

    pub fn to_unitary(&self, domain: Domain) -> Result<BoundaryUnitary> {
        if !self.supports(domain) {
            if let NamedBc::Custom(entries) = self {
                let n = domain.boundary_count();
                return Err(Error::DimensionMismatch {
                    expected: n,
                    rows: entries.len(),
                    cols: 1,
                });
            }
            return Err(Error::IncompatibleDomain {
                bc: self.to_string(),
                domain,
            });
        }
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let n = domain.boundary_count();
        let matrix = match self {
            NamedBc::Neumann => DMatrix::identity(n, n),
            NamedBc::Dirichlet => -DMatrix::<Complex64>::identity(n, n),
            NamedBc::RobinHalfLine { alpha } => {
                DMatrix::from_element(1, 1, Complex64::from_polar(1.0, *alpha))
            }
            NamedBc::Periodic => {
                DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            }
            NamedBc::PseudoPeriodic { epsilon } => DMatrix::from_row_slice(
                2,
                2,
                &[
                    c(0.0, 0.0),
                    Complex64::from_polar(1.0, -epsilon),
                    Complex64::from_polar(1.0, *epsilon),
                    c(0.0, 0.0),
                ],
            ),
            NamedBc::QuasiPeriodic { alpha } => {
                let (s, co) = alpha.sin_cos();
                DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(s, 0.0), c(s, 0.0), c(-co, 0.0)])
            }
            NamedBc::DeltaPoint { a } => {
                let scale = c(2.0, -a).inv();
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[c(0.0, *a) * scale, 2.0 * scale, 2.0 * scale, c(0.0, *a) * scale],
                )
            }
            NamedBc::Custom(entries) => DMatrix::from_row_slice(n, n, entries),
        };
        BoundaryUnitary::new(domain, matrix)
    }
}

fn fmt_param(f: &mut fmt::Formatter<'_>, name: &str, key: &str, v: f64) -> fmt::Result {
    write!(f, "{name}:{key}={v}")
}

impl fmt::Display for NamedBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedBc::Neumann => f.write_str("neumann"),
            NamedBc::Dirichlet => f.write_str("dirichlet"),
            NamedBc::RobinHalfLine { alpha } => fmt_param(f, "robin", "alpha", *alpha),
            NamedBc::Periodic => f.write_str("periodic"),
            NamedBc::PseudoPeriodic { epsilon } => fmt_param(f, "pseudo", "eps", *epsilon),
            NamedBc::QuasiPeriodic { alpha } => fmt_param(f, "quasi", "alpha", *alpha),
            NamedBc::DeltaPoint { a } => fmt_param(f, "delta", "a", *a),
            NamedBc::Custom(entries) => {
                f.write_str("custom:[")?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "[{},{}]", e.re, e.im)?;
                }
                f.write_str("]")
            }
        }
    }
}

const BC_EXAMPLES: &str = "neumann | dirichlet | robin:alpha=1.0 | periodic | pseudo:eps=0.5 | \
quasi:alpha=0.5 | delta:a=1.0 | custom:[[0,0],[1,0],[1,0],[0,0]]";

fn parse_param(token: &str, body: &str, key: &str, example: &str) -> Result<f64> {
    let err = |reason: &str| Error::Parse {
        token: token.to_string(),
        reason: reason.to_string(),
        example: example.to_string(),
    };
    let value = body
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| err(&format!("expected `{key}=<float>`")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| err(&format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(err("parameter must be finite"));
    }
    Ok(v)
}

impl FromStr for NamedBc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let token = s.trim();
        let (head, body) = match token.split_once(':') {
            Some((h, b)) => (h, Some(b)),
            None => (token, None),
        };
        let head = head.to_ascii_lowercase();
        let missing = |example: &str| Error::Parse {
            token: token.to_string(),
            reason: "missing parameter".into(),
            example: example.to_string(),
        };
        match (head.as_str(), body) {
            ("neumann", None) => Ok(NamedBc::Neumann),
            ("dirichlet", None) => Ok(NamedBc::Dirichlet),
            ("periodic", None) => Ok(NamedBc::Periodic),
            ("robin", Some(b)) => Ok(NamedBc::RobinHalfLine {
                alpha: parse_param(token, b, "alpha", "robin:alpha=1.0")?,
            }),
            ("pseudo", Some(b)) => Ok(NamedBc::PseudoPeriodic {
                epsilon: parse_param(token, b, "eps", "pseudo:eps=0.5")?,
            }),
            ("quasi", Some(b)) => Ok(NamedBc::QuasiPeriodic {
                alpha: parse_param(token, b, "alpha", "quasi:alpha=0.5")?,
            }),
            ("delta", Some(b)) => Ok(NamedBc::DeltaPoint {
                a: parse_param(token, b, "a", "delta:a=1.0")?,
            }),
            ("custom", Some(b)) => {
                let example = "custom:[[0,0],[1,0],[1,0],[0,0]]";
                let pairs: Vec<[f64; 2]> =
                    serde_json::from_str(b).map_err(|e| Error::Parse {
                        token: token.to_string(),
                        reason: format!("expected a list of [re,im] pairs ({e})"),
                        example: example.into(),
                    })?;
                if pairs.len() != 1 && pairs.len() != 4 {
                    return Err(Error::Parse {
                        token: token.to_string(),
                        reason: format!("need 1 or 4 entries, got {}", pairs.len()),
                        example: example.into(),
                    });
                }
                Ok(NamedBc::Custom(
                    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
                ))
            }
            ("robin", None) => Err(missing("robin:alpha=1.0")),
            ("pseudo", None) => Err(missing("pseudo:eps=0.5")),
            ("quasi", None) => Err(missing("quasi:alpha=0.5")),
            ("delta", None) => Err(missing("delta:a=1.0")),
            _ => Err(Error::Parse {
                token: token.to_string(),
                reason: "unknown boundary condition".into(),
                example: BC_EXAMPLES.into(),
            }),
        }
    }
}
