use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kreinpath::export::{spectrum_records, EigenvalueRow, EstimateRecord, KernelRow, Metadata, ResolventRow, Table};
use kreinpath::path_mc::{mc_dirichlet_kernel, mc_neumann_kernel, mc_winding_kernel};
use kreinpath::propagator::{
    evolve_packet, has_image_form, HeatKernel, ImageSumKernel, InverseLaplaceKernel, SpectralKernel, IMAGE_TOL,
};
use kreinpath::resolvent::{closed_form_resolvent, has_closed_form, krein_resolvent, ResolventFamily};
use kreinpath::spectral::solve_spectrum;
use kreinpath::{Domain, McConfig, McEstimate, NamedBc, WavePacket};

use crate::args::{
    BcListArgs, Command, EvolveArgs, KernelArgs, McArgs, Method, ResolventArgs, ResolventMethod, SpectrumArgs, Target,
};
use crate::{emit, CliError};

/// Default tail tolerance of eigensums.
pub(crate) const SPECTRAL_TAIL_TOL: f64 = 1e-12;

pub(crate) fn dispatch(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::BcList(a) => bc_list(a, stdout),
        Command::Resolvent(a) => resolvent(a, stdout),
        Command::Kernel(a) => kernel(a, stdout),
        Command::Spectrum(a) => spectrum(a, stdout),
        Command::Mc(a) => mc(a, stdout),
        Command::Compare(a) => crate::compare::compare(a, stdout, stderr),
        Command::Evolve(a) => evolve(a, stdout),
    }
}

/// Methods that can evaluate the heat kernel of `bc` on `domain`.
pub(crate) fn available_methods(bc: &NamedBc, domain: Domain) -> Vec<Method> {
    let mut out = vec![];
    let images = has_image_form(bc, domain);
    if images {
        out.push(Method::Images);
    }
    if domain == Domain::UnitInterval {
        out.push(Method::Spectral);
    }
    out.push(Method::Laplace);
    // the path estimators realise exactly the image-sum prescriptions
    if images {
        out.push(Method::Mc);
    }
    out
}

fn method_list(methods: &[Method]) -> String {
    methods.iter().map(Method::to_string).collect::<Vec<_>>().join(", ")
}

pub(crate) fn require_method(target: &Target, method: Method) -> Result<(), CliError> {
    let domain = target.domain();
    target.bc.to_unitary(domain)?;
    let valid = available_methods(&target.bc, domain);
    if valid.contains(&method) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "method `{method}` is not available for `{}` on the {domain}; valid methods: {}",
            target.bc,
            method_list(&valid)
        )))
    }
}

pub(crate) fn unavailable(target: &Target, reason: &str) -> CliError {
    let valid = available_methods(&target.bc, target.domain());
    CliError::Usage(format!(
        "{reason}; `{}` on the {} supports: {}",
        target.bc,
        target.domain(),
        method_list(&valid)
    ))
}

fn check_points(domain: Domain, points: &[f64]) -> Result<(), CliError> {
    match points.iter().find(|p| !domain.contains(**p)) {
        Some(p) => Err(CliError::Usage(format!("point {p} is outside the {domain}"))),
        None => Ok(()),
    }
}

/// A deterministic kernel evaluator for `method`, valid for times `>= t_min`.
pub(crate) fn build_kernel(
    target: &Target,
    method: Method,
    t_min: f64,
    tol: Option<f64>,
) -> Result<Box<dyn HeatKernel>, CliError> {
    require_method(target, method)?;
    let domain = target.domain();
    let u = target.bc.to_unitary(domain)?;
    Ok(match method {
        Method::Images => Box::new(ImageSumKernel::new(target.bc.clone(), domain)?.with_tol(tol.unwrap_or(IMAGE_TOL))),
        Method::Spectral => {
            if !(t_min > 0.0) {
                return Err(CliError::Usage(format!("T must be positive, got {t_min}")));
            }
            Box::new(SpectralKernel::new(&u, t_min, tol.unwrap_or(SPECTRAL_TAIL_TOL))?)
        }
        Method::Laplace => {
            let family = if has_closed_form(&target.bc) {
                ResolventFamily::closed_form(target.bc.clone(), domain)?
            } else {
                ResolventFamily::krein(u)
            };
            Box::new(InverseLaplaceKernel::new(family)?)
        }
        Method::Mc => unreachable!("sampling is not a deterministic kernel"),
    })
}

/// Run the path estimator matching `bc`.
pub(crate) fn run_mc(target: &Target, cfg: &McConfig) -> Result<McEstimate, CliError> {
    require_method(target, Method::Mc)?;
    let domain = target.domain();
    Ok(match target.bc {
        NamedBc::Dirichlet => mc_dirichlet_kernel(cfg, domain)?,
        NamedBc::Neumann => mc_neumann_kernel(cfg, domain)?,
        NamedBc::Periodic => mc_winding_kernel(cfg, 0.0)?,
        NamedBc::PseudoPeriodic { epsilon } => mc_winding_kernel(cfg, epsilon)?,
        _ => return Err(unavailable(target, "no path estimator")),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcRow {
    pub bc: String,
    pub domain: Domain,
    pub closed_form: bool,
    pub image_form: bool,
    pub methods: String,
}

fn bc_list(a: &BcListArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let domains = match a.domain {
        Some(d) => vec![d],
        None => vec![Domain::HalfLine, Domain::UnitInterval],
    };
    let mut rows = vec![];
    for bc in NamedBc::catalog() {
        for &d in &domains {
            if bc.supports(d) {
                rows.push(BcRow {
                    bc: bc.to_string(),
                    domain: d,
                    closed_form: has_closed_form(&bc),
                    image_form: has_image_form(&bc, d),
                    methods: available_methods(&bc, d).iter().map(Method::to_string).collect::<Vec<_>>().join(";"),
                });
            }
        }
    }
    emit(&a.output, &rows, &rows, stdout)
}

fn resolvent(a: &ResolventArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let domain = a.target.domain();
    let u = a.target.bc.to_unitary(domain)?;
    let (xs, ys) = (a.x.values(), a.y.values());
    check_points(domain, &xs)?;
    check_points(domain, &ys)?;
    let use_closed = match a.method {
        ResolventMethod::Auto => has_closed_form(&a.target.bc),
        ResolventMethod::ClosedForm => true,
        ResolventMethod::Krein => false,
    };
    let method = if use_closed { "closed-form" } else { "krein" };
    let mut rows = vec![];
    for &z in &a.z {
        let eval = if use_closed {
            closed_form_resolvent(&a.target.bc, domain, z)?
        } else {
            krein_resolvent(&u, z)?
        };
        for &x in &xs {
            for &y in &ys {
                let v = eval.value(x, y);
                rows.push(ResolventRow { x, y, z_re: z.re, z_im: z.im, re: v.re, im: v.im });
            }
        }
    }
    let table = Table { metadata: Metadata::new(domain, &a.target.bc, method), rows };
    emit(&a.output, &table.rows, &table, stdout)
}

/// Evaluate `kernel` at row-major points in parallel, keeping the order.
pub(crate) fn evaluate(kernel: &dyn HeatKernel, points: &[(f64, f64, f64)]) -> Result<Vec<KernelRow>, CliError> {
    points
        .par_iter()
        .map(|&(t, x, y)| Ok(KernelRow::new(x, y, t, kernel.eval(t, x, y)?)))
        .collect()
}

pub(crate) fn t_min(points: &[(f64, f64, f64)]) -> f64 {
    points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min)
}

fn kernel(a: &KernelArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if a.method == Method::Mc {
        return Err(CliError::Usage("sampled kernels carry error bars; use the `mc` command".into()));
    }
    let points = a.points.triples();
    let k = build_kernel(&a.target, a.method, t_min(&points), a.tol)?;
    let rows = evaluate(k.as_ref(), &points)?;
    let table = Table { metadata: Metadata::new(a.target.domain(), &a.target.bc, k.method()), rows };
    emit(&a.output, &table.rows, &table, stdout)
}

fn spectrum(a: &SpectrumArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let domain = a.target.domain();
    if domain != Domain::UnitInterval {
        return Err(CliError::Usage(
            "the half-line spectrum is continuous; bound states appear as resolvent poles".into(),
        ));
    }
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let spec = solve_spectrum(&a.target.bc.to_unitary(domain)?, a.n)?;
    let rows: Vec<_> = spec
        .pairs
        .iter()
        .enumerate()
        .map(|(index, p)| EigenvalueRow { index, eigenvalue: p.eigenvalue, multiplicity: p.multiplicity })
        .collect();
    let table = Table {
        metadata: Metadata::new(domain, &a.target.bc, "secular"),
        rows: spectrum_records(&spec, a.samples),
    };
    emit(&a.output, &rows, &table, stdout)
}

fn mc(a: &McArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut rows = vec![];
    for (t, x, y) in a.points.triples() {
        let cfg = McConfig::new(t, x, y).paths(a.sampling.paths).steps(a.sampling.steps).seed(a.sampling.seed);
        let est = run_mc(&a.target, &cfg)?;
        rows.push(EstimateRecord::new(&est, &cfg, &a.target.bc));
    }
    emit(&a.output, &rows, &rows, stdout)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub x: f64,
    pub re: f64,
    pub im: f64,
}

fn evolve(a: &EvolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let domain = a.target.domain();
    if domain != Domain::UnitInterval {
        return Err(CliError::Usage("packets are evolved on the interval only".into()));
    }
    if !(a.width > 0.0) {
        return Err(CliError::Usage(format!("--width must be positive, got {}", a.width)));
    }
    let spec = solve_spectrum(&a.target.bc.to_unitary(domain)?, a.modes)?;
    let psi = WavePacket::gaussian(a.centre, a.width, a.points)?;
    let grid = psi.grid();
    let mut rows = vec![];
    for t in a.t.values() {
        let evolved = evolve_packet(&psi, &spec, t, a.tol)?;
        rows.extend(grid.iter().zip(&evolved.packet.samples).map(|(&x, v)| EvolveRow { t, x, re: v.re, im: v.im }));
    }
    let table = Table { metadata: Metadata::new(domain, &a.target.bc, "spectral"), rows };
    emit(&a.output, &table.rows, &table, stdout)
}
