//! Path-integral Monte Carlo estimators of heat kernels.
//!
//! Every estimator samples Brownian bridges from `x` to `y` in time `T`
//! and reweights the free kernel `g_T(x - y)`:
//!
//! * Dirichlet: weight = probability that the bridge never touches the
//!   boundary (paths that reach it are removed);
//! * Neumann: boundary-touching paths are counted again, once per reflection
//!   of the method of images;
//! * winding: bridges to `y + n` on the covering line, weighted by the phase
//!   `e^{i eps n}` of their net winding.
//!
//! Bridges are built by Levy bisection with exact conditional Gaussians, so
//! the only discretisation error is the detection of boundary contacts
//! between grid points, corrected by the bridge hitting probability
//! `exp(-2 d1 d2 / dt)`. Each path draws from its own ChaCha stream derived
//! from `(seed, path index)`, and paths are reduced in fixed-size chunks in
//! index order, so results do not depend on the thread schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc::Domain;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::propagator::free_kernel;

const CHUNK: usize = 4096;
/// Tail weight beyond which winding strata must not be omitted.
pub const WINDING_TRUNCATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    #[serde(rename = "T")]
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Reduce on the rayon pool (true) or on the calling thread.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl McConfig {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        McConfig {
            n_paths: 100_000,
            n_steps: 256,
            seed: 0,
            t,
            x,
            y,
            parallel: true,
        }
    }

    pub fn paths(mut self, n: usize) -> Self {
        self.n_paths = n;
        self
    }

    pub fn steps(mut self, n: usize) -> Self {
        self.n_steps = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    fn validate(&self, domain: Domain) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::InvalidArgument("n_paths must be >= 1".into()));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidArgument("n_steps must be >= 2".into()));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidArgument(format!("T must be positive, got {}", self.t)));
        }
        for p in [self.x, self.y] {
            if !domain.contains(p) {
                return Err(Error::InvalidArgument(format!("point {p} is outside the {domain}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McMethod {
    Dirichlet,
    Neumann,
    Winding,
}

impl std::fmt::Display for McMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            McMethod::Dirichlet => "mc-dirichlet",
            McMethod::Neumann => "mc-neumann",
            McMethod::Winding => "mc-winding",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: C64,
    pub std_error: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub method: McMethod,
}

/// One refinement of the Levy construction: fill `mid` from `lo` and `hi`.
#[derive(Debug, Clone, Copy)]
struct Split {
    lo: usize,
    mid: usize,
    hi: usize,
    frac: f64,
    sd: f64,
}

/// Level-order bisection plan over `n` steps of length `dt`. For powers of
/// two, the plan for `2n` starts with the plan for `n`, so refining the
/// grid keeps the coarse points of each path.
fn levy_plan(n: usize, dt: f64) -> Vec<Split> {
    let mut plan = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::from([(0usize, n)]);
    while let Some((lo, hi)) = queue.pop_front() {
        if hi - lo < 2 {
            continue;
        }
        let mid = (lo + hi) / 2;
        let (a, b) = ((mid - lo) as f64 * dt, (hi - mid) as f64 * dt);
        plan.push(Split {
            lo,
            mid,
            hi,
            frac: a / (a + b),
            sd: (a * b / (a + b)).sqrt(),
        });
        queue.push_back((lo, mid));
        queue.push_back((mid, hi));
    }
    plan
}

fn fill_bridge(plan: &[Split], from: f64, to: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let n = out.len() - 1;
    out[0] = from;
    out[n] = to;
    for s in plan {
        let z: f64 = rng.sample(StandardNormal);
        out[s.mid] = out[s.lo] + s.frac * (out[s.hi] - out[s.lo]) + s.sd * z;
    }
}

/// Probability that a bridge between `a` and `b` (distances to a face,
/// positive inside) touches the face within time `dt`.
fn hit_probability(a: f64, b: f64, dt: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 1.0;
    }
    let e = 2.0 * a * b / dt;
    if e > 40.0 {
        0.0
    } else {
        (-e).exp()
    }
}

/// Distances to each boundary face, positive inside the domain.
fn face_distances(domain: Domain, x: f64) -> [f64; 2] {
    match domain {
        Domain::HalfLine => [x, f64::INFINITY],
        Domain::UnitInterval => [x, 1.0 - x],
    }
}

/// Running mean and summed squared deviations (Welford, merged pairwise).
#[derive(Default, Clone, Copy)]
struct Moments {
    n: usize,
    mean: C64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, w: C64) {
        self.n += 1;
        let delta = w - self.mean;
        self.mean += delta / self.n as f64;
        let after = w - self.mean;
        self.m2 += delta.re * after.re + delta.im * after.im;
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        let frac = o.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * frac,
            m2: self.m2 + o.m2 + delta.norm_sqr() * self.n as f64 * frac,
        }
    }

    /// Mean and standard error of the mean.
    fn finish(&self) -> (C64, f64) {
        if self.n < 2 {
            return (self.mean, 0.0);
        }
        let n = self.n as f64;
        (self.mean, (self.m2.max(0.0) / (n - 1.0) / n).sqrt())
    }
}

fn path_rngs(seed: u64, index: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut normals = base.clone();
    normals.set_stream(2 * index as u64);
    let mut uniforms = base;
    uniforms.set_stream(2 * index as u64 + 1);
    (normals, uniforms)
}

/// Run `weight(normals, uniforms, buffer)` over all paths with a
/// deterministic chunked reduction.
fn reduce<W>(cfg: &McConfig, weight: W) -> (C64, f64)
where
    W: Fn(&mut ChaCha8Rng, &mut ChaCha8Rng, &mut Vec<f64>) -> C64 + Sync,
{
    let chunks = cfg.n_paths.div_ceil(CHUNK);
    let run_chunk = |c: usize| {
        let mut m = Moments::default();
        let mut buf = vec![0.0; cfg.n_steps + 1];
        for i in c * CHUNK..((c + 1) * CHUNK).min(cfg.n_paths) {
            let (mut normals, mut uniforms) = path_rngs(cfg.seed, i);
            m.push(weight(&mut normals, &mut uniforms, &mut buf));
        }
        m
    };
    let parts: Vec<Moments> = if cfg.parallel {
        (0..chunks).into_par_iter().map(run_chunk).collect()
    } else {
        (0..chunks).map(run_chunk).collect()
    };
    parts
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .finish()
}

fn scaled_estimate(cfg: &McConfig, method: McMethod, scale: f64, stats: (C64, f64)) -> McEstimate {
    McEstimate {
        mean: stats.0 * scale,
        std_error: stats.1 * scale,
        n_paths: cfg.n_paths,
        n_steps: cfg.n_steps,
        seed: cfg.seed,
        method,
    }
}

/// Kernel restricted to paths that never reach the boundary.
pub fn mc_dirichlet_kernel(cfg: &McConfig, domain: Domain) -> Result<McEstimate> {
    cfg.validate(domain)?;
    for p in [cfg.x, cfg.y] {
        if domain.on_boundary(p) {
            return Err(Error::EndpointOnBoundary { point: p });
        }
    }
    let dt = cfg.t / cfg.n_steps as f64;
    let plan = levy_plan(cfg.n_steps, dt);
    let stats = reduce(cfg, |normals, _, path| {
        fill_bridge(&plan, cfg.x, cfg.y, normals, path);
        survival(domain, path, dt)
    });
    Ok(scaled_estimate(cfg, McMethod::Dirichlet, free_kernel(cfg.t, cfg.x - cfg.y), stats))
}

/// Conditional probability that the discretised bridge stays inside.
fn survival(domain: Domain, path: &[f64], dt: f64) -> C64 {
    let mut keep = 1.0;
    for w in path.windows(2) {
        let (a, b) = (face_distances(domain, w[0]), face_distances(domain, w[1]));
        for f in 0..2 {
            keep *= 1.0 - hit_probability(a[f], b[f], dt);
        }
        if keep == 0.0 {
            break;
        }
    }
    C64::new(keep, 0.0)
}

/// Kernel in which every boundary-touching path is counted once more per reflection.
///
/// On the half-line the weight is `1 + P(touch 0)` (averaged analytically
/// over the sub-step crossings). On the interval the sequence of faces
/// touched is sampled; a path whose alternating face sequence has length
/// `L >= 1` lies in `2L - 1` of the image events, giving weight `2L`.
pub fn mc_neumann_kernel(cfg: &McConfig, domain: Domain) -> Result<McEstimate> {
    cfg.validate(domain)?;
    let dt = cfg.t / cfg.n_steps as f64;
    let plan = levy_plan(cfg.n_steps, dt);
    let stats = match domain {
        Domain::HalfLine => reduce(cfg, |normals, _, path| {
            fill_bridge(&plan, cfg.x, cfg.y, normals, path);
            C64::new(2.0, 0.0) - survival(domain, path, dt)
        }),
        Domain::UnitInterval => reduce(cfg, |normals, uniforms, path| {
            fill_bridge(&plan, cfg.x, cfg.y, normals, path);
            let blocks = face_blocks(path, dt, uniforms);
            C64::new(if blocks == 0 { 1.0 } else { 2.0 * blocks as f64 }, 0.0)
        }),
    };
    Ok(scaled_estimate(cfg, McMethod::Neumann, free_kernel(cfg.t, cfg.x - cfg.y), stats))
}

/// Number of alternating blocks in the sampled sequence of faces touched.
fn face_blocks(path: &[f64], dt: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut last: Option<usize> = None;
    let mut blocks = 0;
    for w in path.windows(2) {
        let (a, b) = (face_distances(Domain::UnitInterval, w[0]), face_distances(Domain::UnitInterval, w[1]));
        // nearer face first if both are touched within one step
        let order = if a[0] <= a[1] { [0, 1] } else { [1, 0] };
        for f in order {
            let p = hit_probability(a[f], b[f], dt);
            let hit = p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p);
            if hit && last != Some(f) {
                last = Some(f);
                blocks += 1;
            }
        }
    }
    blocks
}

/// Periodic (`eps = 0`) or pseudo-periodic kernel as a sum over windings.
///
/// Windings `n` with `|x - y - n| <= 8 sqrt(T) + 2` are enumerated and
/// sampled in proportion to their free weight `g_T(x - y - n)`; each sample
/// draws a bridge from `x` to `y + n` on the covering line and contributes
/// the phase of its net number of crossings of the integers.
pub fn mc_winding_kernel(cfg: &McConfig, epsilon: f64) -> Result<McEstimate> {
    cfg.validate(Domain::UnitInterval)?;
    let (x, y, t) = (cfg.x, cfg.y, cfg.t);
    let reach = 8.0 * t.sqrt() + 2.0;
    let lo = (x - y - reach).ceil() as i64;
    let hi = (x - y + reach).floor() as i64;
    let strata: Vec<(i64, f64)> = (lo..=hi).map(|n| (n, free_kernel(t, x - y - n as f64))).collect();
    let total: f64 = strata.iter().map(|s| s.1).sum();
    // omitted relative weight, bounded by the next terms on each side and a geometric tail
    let edge = free_kernel(t, x - y - (lo - 1) as f64) + free_kernel(t, x - y - (hi + 1) as f64);
    let omitted = 2.0 * edge / total;
    if omitted > WINDING_TRUNCATION_TOL {
        return Err(Error::WindingTruncation { omitted });
    }
    let mut cumulative = Vec::with_capacity(strata.len());
    let mut acc = 0.0;
    for s in &strata {
        acc += s.1 / total;
        cumulative.push(acc);
    }
    let dt = t / cfg.n_steps as f64;
    let plan = levy_plan(cfg.n_steps, dt);
    let stats = reduce(cfg, |normals, uniforms, path| {
        let u: f64 = uniforms.random::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(strata.len() - 1);
        let n = strata[idx].0;
        fill_bridge(&plan, x, y + n as f64, normals, path);
        // endpoints x = 1 or y = 1 sit on a lattice point; count windings relative to them
        let winding = net_crossings(path) - (y.floor() - x.floor()) as i64;
        C64::from_polar(1.0, epsilon * winding as f64)
    });
    Ok(scaled_estimate(cfg, McMethod::Winding, total, stats))
}

/// Net number of upward crossings of the integer lattice along the path.
fn net_crossings(path: &[f64]) -> i64 {
    path.windows(2)
        .map(|w| w[1].floor() as i64 - w[0].floor() as i64)
        .sum()
}
