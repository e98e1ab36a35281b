//! Approach paths to boundary points and convergence verdicts.
//!
//! An evaluator `u(x, t)` is sampled along each path at the heights of a
//! [`ScaleLadder`]; each path tail is read as a [`LadderLimit`] and the
//! per-path limits are aggregated into a [`ConvergenceVerdict`].

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::convolution::{convolve_with, heat_integral_with};
use crate::diagnostics::{LadderLimit, LimitKind, ScaleLadder, ScaleRow, Thresholds};
use crate::geometry::{Dim, Point};
use crate::kernel::KernelProfile;
use crate::measure::Measure;
use crate::quadrature::{Estimate, Tolerance};
use crate::tail::{spread, TAIL_LEN};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Fractions of the aperture used by cone sweeps; never 1.
pub const CONE_BETAS: [f64; 3] = [0.0, 0.5, 0.9];

/// Tolerance of the convolution evaluators.
pub const PROBE_TOL: Tolerance = Tolerance { abs: 1e-9, rel: 1e-9 };

/// `S(x0, alpha) = {(x, t) : |x - x0| < alpha t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub vertex: Point,
    pub aperture: f64,
}

impl Cone {
    pub fn new(vertex: Point, aperture: f64) -> Result<Cone> {
        if !vertex.is_finite() {
            return Err(Error::InvalidQuery(alloc::format!("bad vertex {vertex:?}")));
        }
        if !(aperture > 0.0) || !aperture.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("aperture must be positive, got {aperture}")));
        }
        Ok(Cone { vertex, aperture })
    }

    pub fn contains(&self, x: Point, t: f64) -> bool {
        t > 0.0 && x.dist(self.vertex) < self.aperture * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    /// `x = x0 + beta alpha t u`.
    ConeSweep { aperture: f64, beta: f64, direction: Point },
    /// `(x, t) = (x0 + r xi, r eta)`.
    Ray { xi: Point, eta: f64 },
    /// `x = x0 + beta sqrt(alpha t) u`.
    Parabolic { alpha: f64, beta: f64, direction: Point },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub x: Point,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePath {
    pub kind: PathKind,
    pub points: Vec<ProbePoint>,
}

impl ProbePath {
    pub fn label(&self, dim: Dim) -> String {
        let fmt_dir = |u: Point| match dim {
            Dim::One => alloc::format!("{:+}", u.x()),
            Dim::Two => alloc::format!("{:.4}", u.angle()),
        };
        match self.kind {
            PathKind::ConeSweep { beta, .. } if beta == 0.0 => "vertical".into(),
            PathKind::ConeSweep { beta, direction, .. } => alloc::format!("cone beta={beta} dir={}", fmt_dir(direction)),
            PathKind::Ray { xi, eta } => match dim {
                Dim::One => alloc::format!("ray ({}, {eta})", xi.x()),
                Dim::Two => alloc::format!("ray ({}, {}, {eta})", xi.x(), xi.y()),
            },
            PathKind::Parabolic { beta, direction, .. } => alloc::format!("parabolic beta={beta} dir={}", fmt_dir(direction)),
        }
    }
}

/// Sweep directions: `+-1` in one dimension, `count` equally spaced angles
/// in two.
fn sweep_directions(dim: Dim, count: usize) -> Vec<Point> {
    match dim {
        Dim::One => alloc::vec![Point::d1(1.0), Point::d1(-1.0)],
        Dim::Two => (0..count.max(2))
            .map(|j| Point::polar(2.0 * PI * j as f64 / count.max(2) as f64))
            .collect(),
    }
}

/// Default number of cone paths: the vertical path plus both nonzero
/// betas in every direction.
pub fn default_path_count(dim: Dim) -> usize {
    match dim {
        Dim::One => 5,
        Dim::Two => 9,
    }
}

/// `(beta, direction)` pairs: the axis first, then `beta = 0.9` and `0.5`
/// over the directions. One dimension has at most five distinct paths.
fn sweep_plan(dim: Dim, d: usize) -> Result<Vec<(f64, Point)>> {
    if d < 3 {
        return Err(Error::InvalidParameter(alloc::format!("need at least 3 paths, got {d}")));
    }
    let dirs = sweep_directions(dim, (d - 1).div_ceil(2));
    let mut plan = alloc::vec![(0.0, Point::ORIGIN)];
    for &beta in CONE_BETAS[1..].iter().rev() {
        for &u in &dirs {
            plan.push((beta, u));
        }
    }
    plan.truncate(d);
    Ok(plan)
}

fn check_vertex(x0: Point, dim: Dim) -> Result<()> {
    if !x0.is_finite() || (dim == Dim::One && x0.y() != 0.0) {
        return Err(Error::InvalidQuery(alloc::format!("bad point {x0:?} for n = {}", dim.n())));
    }
    Ok(())
}

/// `d` paths inside `S(x0, alpha)` at the ladder heights.
pub fn cone_sequences(c: &Cone, dim: Dim, ladder: &ScaleLadder, d: usize) -> Result<Vec<ProbePath>> {
    check_vertex(c.vertex, dim)?;
    ladder.validate()?;
    let ts = ladder.scales();
    Ok(sweep_plan(dim, d)?
        .into_iter()
        .map(|(beta, u)| ProbePath {
            kind: PathKind::ConeSweep {
                aperture: c.aperture,
                beta,
                direction: u,
            },
            points: ts
                .iter()
                .map(|&t| ProbePoint {
                    x: c.vertex + u * (beta * c.aperture * t),
                    t,
                })
                .collect(),
        })
        .collect())
}

/// A path with its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLimit {
    pub path: ProbePath,
    /// Rows are indexed by `t`.
    pub limit: LadderLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvergenceStatus {
    Converges,
    Diverges,
    PathDependent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    pub status: ConvergenceStatus,
    pub limit: Option<Complex64>,
    pub error: f64,
    pub paths: Vec<PathLimit>,
    /// Spread of all path values over the last scales.
    pub oscillation: f64,
}

/// Samples `u` along `path`; a failed evaluation ends the path.
pub fn follow<U>(u: &U, path: ProbePath, th: &Thresholds) -> PathLimit
where
    U: Fn(Point, f64) -> Result<Estimate<Complex64>>,
{
    let mut rows = Vec::with_capacity(path.points.len());
    for p in &path.points {
        match u(p.x, p.t) {
            Ok(v) => rows.push(ScaleRow {
                delta: p.t,
                value: v.value,
                error: v.error,
            }),
            Err(e) => {
                let note = alloc::format!("at x = {:?}, t = {:e}: {e}", p.x, p.t);
                let mut limit = LadderLimit::failed(rows, e);
                limit.note = Some(note);
                return PathLimit { path, limit };
            }
        }
    }
    PathLimit {
        limit: LadderLimit::read(rows, th),
        path,
    }
}

/// Aggregates path limits: agreement within `th.limit` converges, two
/// limits more than `3 th.limit` apart are path dependent.
pub fn aggregate(paths: Vec<PathLimit>, th: &Thresholds) -> ConvergenceVerdict {
    let mut tails = Vec::new();
    for p in &paths {
        let rows = &p.limit.rows;
        tails.extend(rows[rows.len().saturating_sub(TAIL_LEN)..].iter().map(|r| r.value));
    }
    let oscillation = spread(&tails);
    let limits: Vec<(Complex64, f64)> = paths
        .iter()
        .filter_map(|p| p.limit.limit.map(|l| (l, p.limit.error)))
        .collect();
    let mut split = false;
    for (i, a) in limits.iter().enumerate() {
        for b in &limits[i + 1..] {
            if (a.0 - b.0).norm() - a.1 - b.1 > 3.0 * th.limit {
                split = true;
            }
        }
    }
    let all_exist = paths.iter().all(|p| p.limit.kind == LimitKind::Exists);
    let any = |k: LimitKind| paths.iter().any(|p| p.limit.kind == k);
    let values: Vec<Complex64> = limits.iter().map(|l| l.0).collect();
    let mut verdict = ConvergenceVerdict {
        status: ConvergenceStatus::Inconclusive,
        limit: None,
        error: f64::INFINITY,
        paths: Vec::new(),
        oscillation,
    };
    if split {
        verdict.status = ConvergenceStatus::PathDependent;
    } else if any(LimitKind::Infinite) || any(LimitKind::NoLimit) {
        verdict.status = ConvergenceStatus::Diverges;
    } else if all_exist && !values.is_empty() && spread(&values) <= th.limit {
        verdict.status = ConvergenceStatus::Converges;
        verdict.limit = Some(values[0]);
        verdict.error = limits.iter().map(|l| l.1).fold(0.0, f64::max) + spread(&values);
    }
    verdict.paths = paths;
    verdict
}

/// Runs `u` along the cone paths of `c`.
pub fn nontangential_limit<U>(u: &U, c: &Cone, dim: Dim, ladder: &ScaleLadder, th: &Thresholds, d: usize) -> Result<ConvergenceVerdict>
where
    U: Fn(Point, f64) -> Result<Estimate<Complex64>>,
{
    let paths = cone_sequences(c, dim, ladder, d)?;
    Ok(aggregate(paths.into_iter().map(|p| follow(u, p, th)).collect(), th))
}

pub fn ray_path(x0: Point, xi: Point, eta: f64, ladder: &ScaleLadder) -> Result<ProbePath> {
    if !(eta > 0.0) || !eta.is_finite() || !xi.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("bad ray ({xi:?}, {eta})")));
    }
    ladder.validate()?;
    Ok(ProbePath {
        kind: PathKind::Ray { xi, eta },
        points: ladder
            .scales()
            .into_iter()
            .map(|r| ProbePoint { x: x0 + xi * r, t: r * eta })
            .collect(),
    })
}

/// Limit of `u(x0 + r xi, r eta)` as `r -> 0`.
pub fn ray_limit<U>(u: &U, x0: Point, xi: Point, eta: f64, ladder: &ScaleLadder, th: &Thresholds) -> Result<ConvergenceVerdict>
where
    U: Fn(Point, f64) -> Result<Estimate<Complex64>>,
{
    let path = ray_path(x0, xi, eta, ladder)?;
    Ok(aggregate(alloc::vec![follow(u, path, th)], th))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayFan {
    pub rays: Vec<ConvergenceVerdict>,
    /// Every ray converges and two limits are more than `3 th.limit` apart.
    pub ray_dependent: bool,
}

impl RayFan {
    pub fn all_converge(&self) -> bool {
        self.rays.iter().all(|r| r.status == ConvergenceStatus::Converges)
    }
}

pub fn ray_fan<U>(u: &U, x0: Point, rays: &[(Point, f64)], ladder: &ScaleLadder, th: &Thresholds) -> Result<RayFan>
where
    U: Fn(Point, f64) -> Result<Estimate<Complex64>>,
{
    if rays.len() < 2 {
        return Err(Error::InvalidParameter("a fan needs at least two rays".into()));
    }
    let mut out = Vec::with_capacity(rays.len());
    for &(xi, eta) in rays {
        out.push(ray_limit(u, x0, xi, eta, ladder, th)?);
    }
    let limits: Vec<(Complex64, f64)> = out.iter().filter_map(|r| r.limit.map(|l| (l, r.error))).collect();
    let all = out.iter().all(|r| r.status == ConvergenceStatus::Converges);
    let mut apart = false;
    for (i, a) in limits.iter().enumerate() {
        for b in &limits[i + 1..] {
            apart |= (a.0 - b.0).norm() - a.1 - b.1 > 3.0 * th.limit;
        }
    }
    Ok(RayFan {
        rays: out,
        ray_dependent: all && apart,
    })
}

/// Outcome of the cone-in-parabola check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Containment {
    pub checked: usize,
    pub passed: usize,
}

impl Containment {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.passed == self.checked
    }
}

/// Checks `|x - x0| < sqrt(alpha t)` on about `count` deterministic points
/// of `S(x0, alpha)` with `t < 1/alpha`.
pub fn containment_check(x0: Point, dim: Dim, alpha: f64, count: usize) -> Result<Containment> {
    check_vertex(x0, dim)?;
    let cone = Cone::new(x0, alpha)?;
    let heights = (count as f64).sqrt().ceil().max(1.0) as usize;
    let per = count.div_ceil(heights);
    let mut out = Containment { checked: 0, passed: 0 };
    for i in 0..heights {
        let t = (i as f64 + 0.5) / (heights as f64 * alpha);
        for j in 0..per {
            if out.checked == count {
                break;
            }
            // fractions of the aperture in (-1, 1)
            let s = -1.0 + (2.0 * j as f64 + 1.0) / per as f64;
            let u = match dim {
                Dim::One => Point::d1(s.signum()),
                Dim::Two => Point::polar(2.0 * PI * (j as f64 * 0.618_033_988_749_894_8).fract()),
            };
            let x = x0 + u * (s.abs() * alpha * t);
            if !cone.contains(x, t) {
                continue;
            }
            out.checked += 1;
            if x.dist(x0) < (alpha * t).sqrt() {
                out.passed += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicReport {
    pub verdict: ConvergenceVerdict,
    pub containment: Containment,
}

/// Paths `|x - x0| = beta sqrt(alpha t)` for `u`, normally the heat
/// extension [`heat_evaluator`], plus the containment check on 1000 points.
pub fn parabolic_limit<U>(u: &U, x0: Point, dim: Dim, alpha: f64, ladder: &ScaleLadder, th: &Thresholds) -> Result<ParabolicReport>
where
    U: Fn(Point, f64) -> Result<Estimate<Complex64>>,
{
    check_vertex(x0, dim)?;
    ladder.validate()?;
    let containment = containment_check(x0, dim, alpha, 1000)?;
    let ts = ladder.scales();
    let paths = sweep_plan(dim, default_path_count(dim))?
        .into_iter()
        .map(|(beta, direction)| ProbePath {
            kind: PathKind::Parabolic { alpha, beta, direction },
            points: ts
                .iter()
                .map(|&t| ProbePoint {
                    x: x0 + direction * (beta * (alpha * t).sqrt()),
                    t,
                })
                .collect(),
        })
        .map(|p| follow(u, p, th))
        .collect();
    Ok(ParabolicReport {
        verdict: aggregate(paths, th),
        containment,
    })
}

/// `(x, t) -> phi[mu](x, t)` at [`PROBE_TOL`].
pub fn convolution_evaluator<'a>(
    mu: &'a Measure,
    k: &'a KernelProfile,
) -> impl Fn(Point, f64) -> Result<Estimate<Complex64>> + 'a {
    move |x, t| convolve_with(mu, k, x, t, PROBE_TOL)
}

/// `(x, t) -> W mu(x, t)` at [`PROBE_TOL`].
pub fn heat_evaluator(mu: &Measure) -> impl Fn(Point, f64) -> Result<Estimate<Complex64>> + '_ {
    move |x, t| heat_integral_with(mu, x, t, PROBE_TOL)
}
