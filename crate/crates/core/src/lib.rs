//! Resolvents, spectra and Euclidean propagators of a free particle on the
//! half-line and the unit interval under arbitrary self-adjoint boundary
//! conditions.
//!
//! Every extension is labelled by a boundary unitary `U` acting on boundary
//! values `phi` and outward normal derivatives `phi_dot`:
//! `phi - i phi_dot = U (phi + i phi_dot)`. The same kernel can be computed
//! by several independent routes (closed forms, Krein's formula, eigensums,
//! contour inversion, path sampling), which is what the crate is built to
//! cross-check.

pub mod bc;
pub mod error;
pub mod export;
mod linalg;
pub mod path_mc;
pub mod propagator;
pub mod quadrature;
pub mod resolvent;
pub mod spectral;

pub use bc::{satisfies_bc, BoundaryData, BoundaryUnitary, Domain, NamedBc};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use path_mc::{McConfig, McEstimate, McMethod};
pub use propagator::{HeatKernel, WavePacket};
pub use resolvent::{BoundStateReport, ResolventEval, ResolventFamily, SpectralParameter};
pub use spectral::{EigenPair, Eigenfunction, Spectrum};
