//! Convolution integrals `phi[mu](x, t) = int phi_t(x - xi) dmu(xi)`.
//!
//! Densities are integrated in the scaled variable `xi = x + t u`, so the
//! integrand is `f(x + t u) phi(|u|)` on geometric shells `2^k <= |u| <
//! 2^(k+1)`. The outer shells are dropped once the growth envelope of the
//! density, integrated against `phi`, certifies that the remainder is below
//! a tenth of the tolerance; the dropped mass is part of the error bound.
//! Atoms are summed exactly. Singular distribution functions are handled by
//! Darboux-Stieltjes brackets on each side of `xi = x`, where `phi_t(x - .)`
//! is monotone.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{Dim, Point};
use crate::kernel::KernelProfile;
use crate::measure::{Density, DensityShape, FieldHints, Growth, Measure, SingularCdf};
use crate::quadrature::{integrate_with_breaks, Estimate, Tolerance};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Shells beyond `2^MAX_SHELL` are never needed by a decaying envelope.
const MAX_SHELL: i32 = 400;
/// Hard cap on the number of Stieltjes pieces.
const MAX_PIECES: usize = 2_000_000;
/// Darboux brackets close only linearly in the piece width, so singular
/// parts are resolved to this absolute accuracy at best.
pub const STIELTJES_FLOOR: f64 = 1e-8;

/// A single evaluation of `phi[mu](x, t)`.
#[derive(Debug, Clone, Copy)]
pub struct ConvolutionRequest<'a> {
    pub measure: &'a Measure,
    pub kernel: &'a KernelProfile,
    pub x: Point,
    pub t: f64,
    pub tol: Tolerance,
}

impl<'a> ConvolutionRequest<'a> {
    pub fn new(measure: &'a Measure, kernel: &'a KernelProfile, x: Point, t: f64) -> Self {
        ConvolutionRequest {
            measure,
            kernel,
            x,
            t,
            tol: Tolerance::default(),
        }
    }

    pub fn with_tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn eval(&self) -> Result<Estimate<Complex64>> {
        convolve_with(self.measure, self.kernel, self.x, self.t, self.tol)
    }
}

/// `phi[mu](x, t)` with the default tolerance.
pub fn convolve(mu: &Measure, k: &KernelProfile, x: Point, t: f64) -> Result<Estimate<Complex64>> {
    convolve_with(mu, k, x, t, Tolerance::default())
}

/// `phi[mu](x, t)`; real and imaginary parts each meet `tol`.
pub fn convolve_with(mu: &Measure, k: &KernelProfile, x: Point, t: f64, tol: Tolerance) -> Result<Estimate<Complex64>> {
    check_request(mu, k, x, t)?;
    let sk = k.scaled(t)?;
    let mut value = Complex64::ZERO;
    let mut error = 0.0;

    for (at, mass) in mu.atoms() {
        value += mass * sk.eval(x - at);
    }

    let singulars: Vec<_> = mu.singulars().collect();
    let s_tol = stieltjes_tol(tol.scaled(0.25 / singulars.len().max(1) as f64));
    for (w, s) in singulars {
        let est = stieltjes(s, k, x.x(), t, s_tol)?;
        value += w * est.value;
        error += w.norm() * est.error;
    }

    // unclipped sine waves in closed form: phi_t * sin = hat phi(kappa t) sin
    let mut rest: Vec<(Complex64, &Density)> = Vec::new();
    for (w, d) in mu.densities() {
        match (&d.shape, d.clips.is_empty()) {
            (DensityShape::SineWave { frequency, phase }, true) => {
                let hat = k.fourier(frequency * t)?;
                let eta = x + d.shift;
                value += w * hat.value * (frequency * eta.x() + phase).sin();
                error += w.norm() * hat.error;
            }
            _ => rest.push((w, d)),
        }
    }

    if !rest.is_empty() {
        let field = Field { terms: rest };
        for part in [Part::Re, Part::Im] {
            if field.terms.iter().all(|(w, _)| part.pick(*w) == 0.0) {
                continue;
            }
            let est = field.integrate(k, x, t, part, tol.scaled(0.5))?;
            match part {
                Part::Re => value.re += est.value,
                _ => value.im += est.value,
            }
            error += est.error;
        }
    }
    Ok(Estimate::new(value, error))
}

/// The Poisson integral `P mu(x, t)`.
pub fn poisson_integral(mu: &Measure, x: Point, t: f64) -> Result<Estimate<Complex64>> {
    convolve(mu, &KernelProfile::poisson(mu.dim()), x, t)
}

/// The Gauss-Weierstrass integral `W mu(x, t) = (mu * w_sqrt(t))(x)`.
pub fn heat_integral(mu: &Measure, x: Point, t: f64) -> Result<Estimate<Complex64>> {
    heat_integral_with(mu, x, t, Tolerance::default())
}

pub fn heat_integral_with(mu: &Measure, x: Point, t: f64, tol: Tolerance) -> Result<Estimate<Complex64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("heat time must be positive, got {t}")));
    }
    convolve_with(mu, &KernelProfile::gauss(mu.dim()), x, t.sqrt(), tol)
}

/// Outcome of [`existence_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum Existence {
    /// `|mu| * phi_t0 (x0)` with its error bound.
    Finite(Estimate<f64>),
    Divergent(String),
    Inconclusive(String),
}

/// Evaluates `|mu| * phi_t0 (x0)`. A finite value licenses evaluation of
/// `phi[mu]` on the whole strip `0 < t < t0`.
pub fn existence_check(mu: &Measure, k: &KernelProfile, x0: Point, t0: f64) -> Existence {
    match total_variation_convolution(mu, k, x0, t0, Tolerance { abs: 1e-8, rel: 1e-8 }) {
        Ok(est) => Existence::Finite(est),
        Err(Error::Divergent(msg)) => Existence::Divergent(msg),
        Err(e) => Existence::Inconclusive(alloc::format!("{e}")),
    }
}

/// `|mu| * phi_t (x)`.
pub fn total_variation_convolution(
    mu: &Measure,
    k: &KernelProfile,
    x: Point,
    t: f64,
    tol: Tolerance,
) -> Result<Estimate<f64>> {
    check_request(mu, k, x, t)?;
    let sk = k.scaled(t)?;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut atoms: Vec<(Point, Complex64)> = mu.atoms().collect();
    atoms.sort_by(|a, b| a.0 .0[0].total_cmp(&b.0 .0[0]).then(a.0 .0[1].total_cmp(&b.0 .0[1])));
    let mut i = 0;
    while i < atoms.len() {
        let mut sum = atoms[i].1;
        let mut j = i + 1;
        while j < atoms.len() && atoms[j].0 == atoms[i].0 {
            sum += atoms[j].1;
            j += 1;
        }
        value += sum.norm() * sk.eval(x - atoms[i].0);
        i = j;
    }
    let mut groups: Vec<(&SingularCdf, Complex64)> = Vec::new();
    for (w, s) in mu.singulars() {
        match groups.iter_mut().find(|(g, _)| *g == s) {
            Some(entry) => entry.1 += w,
            None => groups.push((s, w)),
        }
    }
    for (s, w) in groups {
        let est = stieltjes(s, k, x.x(), t, stieltjes_tol(tol.scaled(0.25)))?;
        value += w.norm() * est.value;
        error += w.norm() * est.error;
    }
    let field = Field {
        terms: mu.densities().collect(),
    };
    if !field.terms.is_empty() {
        let est = field.integrate(k, x, t, Part::Abs, tol.scaled(0.5))?;
        value += est.value;
        error += est.error;
    }
    Ok(Estimate::new(value, error))
}

fn stieltjes_tol(tol: Tolerance) -> Tolerance {
    Tolerance {
        abs: tol.abs.max(STIELTJES_FLOOR),
        rel: tol.rel,
    }
}

fn check_request(mu: &Measure, k: &KernelProfile, x: Point, t: f64) -> Result<()> {
    if mu.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: k.dim(),
        });
    }
    if !x.is_finite() || (mu.dim() == Dim::One && x.y() != 0.0) {
        return Err(Error::InvalidQuery(alloc::format!("bad evaluation point {x:?}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("scale t must be positive, got {t}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Re,
    Im,
    Abs,
}

impl Part {
    fn pick(self, w: Complex64) -> f64 {
        match self {
            Part::Re => w.re,
            Part::Im => w.im,
            Part::Abs => w.norm(),
        }
    }
}

/// The weighted sum of density terms.
struct Field<'a> {
    terms: Vec<(Complex64, &'a Density)>,
}

impl Field<'_> {
    fn eval(&self, xi: Point, part: Part) -> f64 {
        match part {
            Part::Abs => self
                .terms
                .iter()
                .fold(Complex64::ZERO, |acc, (w, d)| acc + w * d.eval(xi))
                .norm(),
            _ => self.terms.iter().map(|(w, d)| part.pick(*w) * d.eval(xi)).sum(),
        }
    }

    /// `ln` of the envelope `sum |w_j| G_j(|x| + t u)` of the terms with
    /// unbounded support on the sphere `|u| = u`.
    fn log_envelope(&self, x: Point, t: f64, u: f64, part: Part) -> f64 {
        let rho = x.norm() + t * u;
        let mut acc = f64::NEG_INFINITY;
        for (w, d) in &self.terms {
            let weight = part.pick(*w).abs();
            if weight == 0.0 || d.bounding_ball().is_some() {
                continue;
            }
            acc = log_add(acc, weight.ln() + d.log_growth_bound(rho));
        }
        acc
    }

    /// The radius `|u|` past which the field is dropped, and the certified
    /// bound on the dropped part. Terms with bounded support are always
    /// kept whole; the others are cut once the tail of their growth
    /// envelope against `phi` fits in `budget`.
    fn cutoff(&self, k: &KernelProfile, x: Point, t: f64, part: Part, budget: f64) -> Result<(f64, f64)> {
        let first = first_shell(k);
        let mut reach = libm::ldexp(1.0, first);
        for (_, d) in &self.terms {
            if let Some((c, r)) = d.bounding_ball() {
                reach = reach.max((c.dist(x) + r) / t);
            }
        }
        if self.terms.iter().all(|(_, d)| d.bounding_ball().is_some()) {
            return Ok((reach, 0.0));
        }
        if let Some(r) = k.support_radius() {
            return Ok((reach.max(r), 0.0));
        }
        let n = k.dim().n() as i32;
        let omega = k.dim().sphere_measure();
        let density = |u: f64| -> f64 {
            let log = self.log_envelope(x, t, u, part) + k.log_profile(u) + (n - 1) as f64 * u.ln();
            omega * log.exp()
        };
        let shell_tol = Tolerance { abs: 0.0, rel: 1e-3 };
        // envelope mass of each shell [2^(j-1), 2^j], j > first
        let mut shells: Vec<(f64, f64)> = Vec::new();
        let mut tail = None;
        for j in first + 1..=MAX_SHELL {
            let (lo, hi) = (libm::ldexp(1.0, j - 1), libm::ldexp(1.0, j));
            let e = integrate_with_breaks(density, lo, hi, &k.radial_breaks(), shell_tol)
                .map(|e| e.value + e.error)
                .unwrap_or(f64::INFINITY);
            if !e.is_finite() {
                return Err(Error::Divergent(alloc::format!(
                    "growth envelope times phi is not integrable past |u| = {lo:e}"
                )));
            }
            shells.push((hi, e));
            if let [.., (_, a), (_, b), (_, c)] = shells[..] {
                // geometric decay of the last shells bounds the remainder
                let ratio = (b / a).max(c / b);
                if c == 0.0 || (ratio < 0.9 && c < budget) {
                    tail = Some(if c == 0.0 { 0.0 } else { c * ratio / (1.0 - ratio) });
                    break;
                }
            }
        }
        let Some(mut remainder) = tail else {
            return Err(Error::Divergent(alloc::format!(
                "growth envelope times phi does not decay by |u| = 2^{MAX_SHELL}"
            )));
        };
        // drop whole shells from the outside while the remainder stays in budget
        let mut cut = shells.last().map_or(libm::ldexp(1.0, first), |s| s.0);
        for i in (0..shells.len()).rev() {
            if remainder + shells[i].1 >= budget {
                break;
            }
            remainder += shells[i].1;
            cut = if i == 0 { libm::ldexp(1.0, first) } else { shells[i - 1].0 };
        }
        Ok((cut.max(reach), remainder))
    }

    fn integrate(&self, k: &KernelProfile, x: Point, t: f64, part: Part, tol: Tolerance) -> Result<Estimate<f64>> {
        if self.terms.iter().any(|(_, d)| matches!(d.shape.growth(), Growth::Unknown) && d.bounding_ball().is_none()) {
            return Err(Error::InvalidParameter(
                "a density with unknown growth and unbounded support cannot be convolved with a certified tail".into(),
            ));
        }
        let (cut, remainder) = self.cutoff(k, x, t, part, 0.1 * tol.abs)?;
        let first = first_shell(k);
        let mut breaks: Vec<f64> = Vec::new();
        let mut j = first;
        while libm::ldexp(1.0, j) < cut {
            breaks.push(libm::ldexp(1.0, j));
            j += 1;
        }
        breaks.extend(k.radial_breaks());
        let hints = FieldHints {
            terms: self.terms.iter().map(|(_, d)| *d).collect(),
        };
        let n = k.dim().n() as i32;
        let dirs: &[Point] = &[Point([1.0, 0.0]), Point([-1.0, 0.0])];
        let along = |dir: Point, tol: Tolerance, scratch: &mut Vec<f64>| -> Result<Estimate<f64>> {
            scratch.clear();
            let span = hints.ray(x, dir, scratch);
            if span.is_empty() {
                return Ok(Estimate::exact(0.0));
            }
            let lo = (span.lo / t).max(0.0);
            let hi = (span.hi / t).min(cut);
            if !(hi > lo) {
                return Ok(Estimate::exact(0.0));
            }
            for b in scratch.iter_mut() {
                *b /= t;
            }
            scratch.extend_from_slice(&breaks);
            let f = |u: f64| self.eval(x + dir * (t * u), part) * k.profile(u) * u.powi(n - 1);
            integrate_with_breaks(f, lo, hi, scratch, tol)
        };
        let mut scratch = Vec::new();
        let mut total = match k.dim() {
            Dim::One => {
                let mut acc = Estimate::exact(0.0);
                for &d in dirs {
                    let est = along(d, tol.scaled(0.5), &mut scratch)?;
                    acc.value += est.value;
                    acc.error += est.error;
                }
                acc
            }
            Dim::Two => {
                let angles = hints.kink_angles(x, None);
                let inner_tol = tol.scaled(0.25 / PI);
                let mut inner_err: f64 = 0.0;
                let mut failure = None;
                let outer = integrate_with_breaks(
                    |theta| {
                        if failure.is_some() {
                            return 0.0;
                        }
                        match along(Point::polar(theta), inner_tol, &mut scratch) {
                            Ok(e) => {
                                inner_err = inner_err.max(e.error);
                                e.value
                            }
                            Err(e) => {
                                failure = Some(e);
                                0.0
                            }
                        }
                    },
                    0.0,
                    2.0 * PI,
                    &angles,
                    tol.scaled(0.5),
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                let outer = outer?;
                Estimate::new(outer.value, outer.error + 2.0 * PI * inner_err)
            }
        };
        total.error += remainder;
        Ok(total)
    }
}

fn first_shell(k: &KernelProfile) -> i32 {
    if k.peak().is_finite() {
        -6
    } else {
        -40
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// A piece of the line for the Stieltjes bracket, on one side of `x`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    /// Mass of the piece: `[a, b)` left of `x`, `(a, b]` right of it.
    mass: f64,
    lo: f64,
    hi: f64,
}

impl Piece {
    fn gap(&self) -> f64 {
        self.mass * (self.hi - self.lo)
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.gap().total_cmp(&other.gap()) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap().total_cmp(&other.gap())
    }
}

/// `int phi_t(x - xi) dF(xi)` by upper and lower Darboux-Stieltjes sums,
/// refined by trisecting the piece with the widest bracket.
fn stieltjes(s: &SingularCdf, k: &KernelProfile, x: f64, t: f64, tol: Tolerance) -> Result<Estimate<f64>> {
    let sk = k.scaled(t)?;
    let phi = |xi: f64| sk.eval_radius((x - xi).abs());
    let (lo, hi) = s.support();
    if hi < lo {
        return Ok(Estimate::exact(0.0));
    }
    let scale = (hi - lo).max(1.0);
    let mut heap = BinaryHeap::new();
    let mut point_mass = 0.0;
    let left_piece = |a: f64, b: f64| {
        // phi_t(x - .) increases on [a, b) when b <= x
        let mass = s.mass_between(a, b, true, false, scale);
        Piece { a, b, mass, lo: phi(a), hi: phi(b) }
    };
    let right_piece = |a: f64, b: f64| {
        let mass = s.mass_between(a, b, false, true, scale);
        Piece { a, b, mass, lo: phi(b), hi: phi(a) }
    };
    if lo < x {
        heap.push(left_piece(lo, hi.min(x)));
    }
    if hi > x {
        heap.push(right_piece(lo.max(x), hi));
    }
    if lo <= x && x <= hi {
        point_mass = s.mass_between(x, x, true, true, scale);
    }
    let value = point_mass * phi(x);
    let mut lower = 0.0;
    let mut upper = 0.0;
    for p in heap.iter() {
        lower += p.mass * p.lo;
        upper += p.mass * p.hi;
    }
    // pieces too narrow to split in floating point
    let (mut frozen_lo, mut frozen_hi) = (0.0, 0.0);
    while upper - lower > 2.0 * tol.abs.max(tol.rel * (value + lower).abs()) {
        let Some(p) = heap.pop() else { break };
        if heap.len() + 3 > MAX_PIECES {
            return Err(Error::Accuracy {
                estimate: value + 0.5 * (lower + upper),
                bound: 0.5 * (upper - lower),
            });
        }
        let w = (p.b - p.a) / 3.0;
        let (m1, m2) = (p.a + w, p.a + 2.0 * w);
        if !(m1 > p.a && m2 > m1 && p.b > m2) {
            frozen_lo += p.mass * p.lo;
            frozen_hi += p.mass * p.hi;
            continue;
        }
        lower -= p.mass * p.lo;
        upper -= p.mass * p.hi;
        let left_side = p.b <= x;
        for (a, b) in [(p.a, m1), (m1, m2), (m2, p.b)] {
            let q = if left_side { left_piece(a, b) } else { right_piece(a, b) };
            if q.mass == 0.0 {
                continue;
            }
            lower += q.mass * q.lo;
            upper += q.mass * q.hi;
            heap.push(q);
        }
    }
    // re-sum to shed the drift of the running update
    let (mut lo, mut hi) = (frozen_lo, frozen_hi);
    for p in heap.iter() {
        lo += p.mass * p.lo;
        hi += p.mass * p.hi;
    }
    let v = value + 0.5 * (lo + hi);
    if !v.is_finite() {
        return Err(Error::Accuracy {
            estimate: v,
            bound: f64::INFINITY,
        });
    }
    Ok(Estimate::new(v, 0.5 * (hi - lo)))
}
