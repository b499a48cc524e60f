//! Command-line grammar.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kreinpath::{Complex64 as C64, Domain, NamedBc};

#[derive(Debug, Parser)]
#[command(
    name = "kreinpath",
    version,
    about = "Resolvents, spectra and heat kernels of a free particle under self-adjoint boundary conditions",
    after_help = "Boundary conditions: neumann, dirichlet, robin:alpha=<f>, periodic, pseudo:eps=<f>, \
                  quasi:alpha=<f>, delta:a=<f>, custom:[[re,im],...]\n\
                  Grids: a single value or start:stop:count (inclusive). Complex numbers: re,im.\n\
                  Exit codes: 0 success, 1 usage error, 2 numerical failure or failed comparison."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the named boundary conditions and the methods available for each.
    ///
    /// CSV columns: bc, domain, closed_form, image_form, methods.
    BcList(BcListArgs),
    /// Evaluate the resolvent kernel C_z(x, y) = (1/2) (z + H)^-1 (x, y).
    ///
    /// CSV columns: x, y, z_re, z_im, re, im (rows ordered z, x, y).
    Resolvent(ResolventArgs),
    /// Evaluate the heat kernel K_T(x, y) by one method.
    ///
    /// CSV columns: x, y, T, re, im (rows ordered T, x, y).
    Kernel(KernelArgs),
    /// Eigenvalues of the interval Hamiltonian.
    ///
    /// CSV columns: index, eigenvalue, multiplicity. JSON adds sampled eigenfunctions.
    Spectrum(SpectrumArgs),
    /// Monte Carlo path-integral estimate of the heat kernel.
    ///
    /// CSV columns: method, bc, x, y, T, mean_re, mean_im, std_error, n_paths, n_steps, seed.
    Mc(McArgs),
    /// Evaluate the heat kernel by several methods and report the discrepancies.
    ///
    /// CSV columns: x, y, T, method, re, im, abs_diff, rel_diff, std_error; the
    /// first deterministic method is the reference. The summary goes to stderr.
    Compare(CompareArgs),
    /// Euclidean evolution of a Gaussian wave packet over the computed modes.
    ///
    /// CSV columns: T, x, re, im (rows ordered T, x).
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Target {
    /// halfline or interval; defaults to the only domain the condition supports, else interval.
    #[arg(long, value_parser = parse_domain)]
    pub domain: Option<Domain>,
    /// Boundary condition in canonical text form.
    #[arg(long, value_parser = parse_bc)]
    pub bc: NamedBc,
}

impl Target {
    pub fn domain(&self) -> Domain {
        if let Some(d) = self.domain {
            return d;
        }
        match (self.bc.supports(Domain::HalfLine), self.bc.supports(Domain::UnitInterval)) {
            (true, false) => Domain::HalfLine,
            _ => Domain::UnitInterval,
        }
    }
}

/// Evaluation points: `x`, `y` and `T` grids.
#[derive(Debug, Clone, Args)]
pub struct Points {
    /// Euclidean time: value or start:stop:count.
    #[arg(long = "T", value_parser = parse_grid)]
    pub t: Grid,
    /// Source point: value or start:stop:count.
    #[arg(long, value_parser = parse_grid)]
    pub x: Grid,
    /// Target point: value or start:stop:count.
    #[arg(long, value_parser = parse_grid)]
    pub y: Grid,
}

impl Points {
    /// Row-major `(T, x, y)` triples.
    pub fn triples(&self) -> Vec<(f64, f64, f64)> {
        let (ts, xs, ys) = (self.t.values(), self.x.values(), self.y.values());
        let mut out = Vec::with_capacity(ts.len() * xs.len() * ys.len());
        for &t in &ts {
            for &x in &xs {
                for &y in &ys {
                    out.push((t, x, y));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Args)]
pub struct BcListArgs {
    /// Restrict to one domain.
    #[arg(long, value_parser = parse_domain)]
    pub domain: Option<Domain>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResolventMethod {
    /// Closed form where one exists, otherwise Krein's formula.
    Auto,
    #[value(name = "closed-form")]
    ClosedForm,
    Krein,
}

#[derive(Debug, Clone, Args)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub target: Target,
    /// Spectral parameter `re,im` (or a real number); repeat for several.
    #[arg(long, required = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Vec<C64>,
    #[arg(long, value_parser = parse_grid)]
    pub x: Grid,
    #[arg(long, value_parser = parse_grid)]
    pub y: Grid,
    #[arg(long, value_enum, default_value_t = ResolventMethod::Auto)]
    pub method: ResolventMethod,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Method {
    /// Method-of-images sum.
    Images,
    /// Truncated eigenfunction expansion (interval only).
    Spectral,
    /// Contour inversion of the resolvent.
    #[value(alias = "inverse-laplace")]
    Laplace,
    /// Monte Carlo path sampling.
    Mc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Images => "images",
            Method::Spectral => "spectral",
            Method::Laplace => "laplace",
            Method::Mc => "mc",
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub points: Points,
    /// Truncation tolerance of image sums and eigensums.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub target: Target,
    /// Number of eigenfunctions to compute (degenerate levels count once per function).
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Grid points per eigenfunction in JSON output.
    #[arg(long, default_value_t = kreinpath::export::SPECTRUM_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct Sampling {
    /// Number of sampled paths per point.
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Time steps per path.
    #[arg(long, default_value_t = 256)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub target: Target,
    #[command(flatten)]
    pub points: Points,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub target: Target,
    /// Comma-separated methods, at least two.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub points: Points,
    /// Maximum relative discrepancy between deterministic methods.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub target: Target,
    /// Euclidean times: value or start:stop:count.
    #[arg(long = "T", value_parser = parse_grid)]
    pub t: Grid,
    /// Centre of the initial Gaussian.
    #[arg(long, default_value_t = 0.5)]
    pub centre: f64,
    /// Width of the initial Gaussian.
    #[arg(long, default_value_t = 0.05)]
    pub width: f64,
    /// Grid points of the packet (odd).
    #[arg(long, default_value_t = kreinpath::propagator::PACKET_POINTS)]
    pub points: usize,
    /// Number of modes in the expansion.
    #[arg(long, default_value_t = 200)]
    pub modes: usize,
    /// Allowed truncation error relative to the packet norm.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

/// Inclusive uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + i as f64 * h })
            .collect()
    }
}

fn number(token: &str, what: &str, example: &str) -> Result<f64, String> {
    match token.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{token}` is not a finite {what} (example: `{example}`)")),
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    const EXAMPLE: &str = "0.1:0.9:5";
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => {
            let v = number(v, "number", EXAMPLE)?;
            Ok(Grid { start: v, stop: v, count: 1 })
        }
        [a, b, n] => {
            let count: usize = n
                .trim()
                .parse()
                .map_err(|_| format!("`{n}` is not a point count (example: `{EXAMPLE}`)"))?;
            if count == 0 {
                return Err(format!("grid `{s}` is empty (example: `{EXAMPLE}`)"));
            }
            Ok(Grid {
                start: number(a, "number", EXAMPLE)?,
                stop: number(b, "number", EXAMPLE)?,
                count,
            })
        }
        _ => Err(format!("`{s}` is not a grid (example: `{EXAMPLE}` or `0.3`)")),
    }
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    const EXAMPLE: &str = "0.5,0";
    match s.split(',').collect::<Vec<_>>().as_slice() {
        [re] => Ok(C64::new(number(re, "number", EXAMPLE)?, 0.0)),
        [re, im] => Ok(C64::new(number(re, "number", EXAMPLE)?, number(im, "number", EXAMPLE)?)),
        _ => Err(format!("`{s}` is not a complex number (example: `{EXAMPLE}`)")),
    }
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    s.parse().map_err(|e: kreinpath::Error| e.to_string())
}

fn parse_bc(s: &str) -> Result<NamedBc, String> {
    s.parse().map_err(|e: kreinpath::Error| e.to_string())
}
