//! Cross-method comparison of heat kernels.

use std::io::Write;

use serde::{Deserialize, Serialize};

use kreinpath::propagator::free_kernel;
use kreinpath::{Complex64 as C64, Domain, McConfig};

use crate::args::{CompareArgs, Method};
use crate::commands::{available_methods, build_kernel, evaluate, run_mc, t_min, unavailable};
use crate::{emit, CliError};

/// Values below this fraction of the free-kernel peak `g_T(0)` are compared
/// absolutely, so kernels that vanish at a wall do not inflate the relative error.
pub const RELATIVE_FLOOR: f64 = 1e-3;
/// Allowed Monte Carlo deviation in standard errors.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub method: String,
    pub re: f64,
    pub im: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub domain: Domain,
    pub bc: String,
    pub methods: Vec<String>,
    pub reference: String,
    pub tol: f64,
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    /// Largest Monte Carlo deviation in units of its standard error.
    pub max_mc_sigmas: Option<f64>,
    pub status: String,
    pub rows: Vec<CompareRow>,
}

pub(crate) fn compare(a: &CompareArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut methods: Vec<Method> = vec![];
    for m in &a.methods {
        if !methods.contains(m) {
            methods.push(*m);
        }
    }
    let domain = a.target.domain();
    a.target.bc.to_unitary(domain)?;
    if methods.len() < 2 {
        return Err(unavailable(&a.target, "compare needs at least two distinct methods"));
    }
    let valid = available_methods(&a.target.bc, domain);
    if let Some(bad) = methods.iter().find(|m| !valid.contains(m)) {
        return Err(unavailable(&a.target, &format!("method `{bad}` is unavailable")));
    }
    if !(a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let points = a.points.triples();
    let reference = *methods.iter().find(|m| **m != Method::Mc).expect("two distinct methods include a deterministic one");

    // values[method][point] and optional standard errors
    let mut values: Vec<Vec<(C64, Option<f64>)>> = vec![];
    for &m in &methods {
        let column = if m == Method::Mc {
            let mut col = vec![];
            for &(t, x, y) in &points {
                let cfg = McConfig::new(t, x, y)
                    .paths(a.sampling.paths)
                    .steps(a.sampling.steps)
                    .seed(a.sampling.seed);
                let est = run_mc(&a.target, &cfg)?;
                col.push((est.mean, Some(est.std_error)));
            }
            col
        } else {
            let k = build_kernel(&a.target, m, t_min(&points), None)?;
            evaluate(k.as_ref(), &points)?.into_iter().map(|r| (r.value(), None)).collect()
        };
        values.push(column);
    }
    let ref_col = methods.iter().position(|m| *m == reference).unwrap();

    let mut rows = vec![];
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    let mut max_sigmas: Option<f64> = None;
    let mut pass = true;
    for (i, &(t, x, y)) in points.iter().enumerate() {
        let r = values[ref_col][i].0;
        let scale = r.norm().max(RELATIVE_FLOOR * free_kernel(t, 0.0));
        for (j, &m) in methods.iter().enumerate() {
            let (v, se) = values[j][i];
            let abs = (v - r).norm();
            let rel = abs / scale;
            match se {
                Some(se) => {
                    let sigmas = if se > 0.0 { abs / se } else if abs == 0.0 { 0.0 } else { f64::INFINITY };
                    max_sigmas = Some(max_sigmas.map_or(sigmas, |s: f64| s.max(sigmas)));
                    pass &= abs <= MC_SIGMAS * se + 1e-9 * r.norm();
                }
                None => {
                    max_abs = max_abs.max(abs);
                    max_rel = max_rel.max(rel);
                    pass &= rel <= a.tol;
                }
            }
            rows.push(CompareRow {
                x,
                y,
                t,
                method: m.to_string(),
                re: v.re,
                im: v.im,
                abs_diff: abs,
                rel_diff: rel,
                std_error: se,
            });
        }
    }
    let status = if pass { "PASS" } else { "FAIL" };
    let report = CompareReport {
        domain,
        bc: a.target.bc.to_string(),
        methods: methods.iter().map(Method::to_string).collect(),
        reference: reference.to_string(),
        tol: a.tol,
        max_abs_diff: max_abs,
        max_rel_diff: max_rel,
        max_mc_sigmas: max_sigmas,
        status: status.into(),
        rows,
    };
    emit(&a.output, &report.rows, &report, stdout)?;
    let sigmas = report.max_mc_sigmas.map(|s| format!(" max_mc_sigmas={s:.3}")).unwrap_or_default();
    let _ = writeln!(
        stderr,
        "compare {} on the {domain}: reference={reference} max_abs_diff={:.3e} max_rel_diff={:.3e}{sigmas} tol={:e} status={status}",
        report.bc, max_abs, max_rel, a.tol
    );
    if pass {
        Ok(())
    } else {
        Err(CliError::ComparisonFailed)
    }
}
