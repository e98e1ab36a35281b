//! Radial, radially decreasing kernel profiles `phi(x) = profile(|x|)`,
//! their dilations `phi_t(x) = t^-n phi(x / t)`, and the kernel-side checks:
//! normalization, decay of `|x|^n phi(x)`, the comparison condition, level
//! radii `theta(s)`, and the layer-cake identity.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geometry::{Dim, Point};
use crate::quadrature::{integrate_with_breaks, Estimate, Tolerance};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Panels of the radial integrals start at `2^-40`; below that the whole
/// ball is one panel.
const INNER_EXPONENT: i32 = -40;
/// Last panel exponent tried before a tail is declared divergent.
const OUTER_EXPONENT: i32 = 1000;
/// Radial integrals are truncated once `s^n phi(s)` drops below this.
const TAIL_CUTOFF: f64 = 1e-16;

/// A user-supplied profile.
#[derive(Clone)]
pub struct CustomProfile {
    pub label: String,
    /// Nonincreasing on `[0, inf)`.
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `phi(0)`, possibly `+inf`.
    pub peak: f64,
    pub lower_semicontinuous: bool,
    pub strictly_positive: bool,
    /// Radii where the profile jumps.
    pub jumps: Vec<f64>,
    pub theta: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("label", &self.label)
            .field("peak", &self.peak)
            .field("lower_semicontinuous", &self.lower_semicontinuous)
            .field("strictly_positive", &self.strictly_positive)
            .field("jumps", &self.jumps)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomProfile {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// `c_n / (1 + r^2)^((n + 1) / 2)`, the Poisson kernel at `t = 1`.
    Poisson,
    /// `(4 pi)^(-n/2) exp(-r^2 / 4)`.
    Gauss,
    /// `exp(-r)` for `r <= 1`, `exp(-2 r)` for `r > 1`. Not lower
    /// semicontinuous, and not normalized.
    SplitExp,
    /// Indicator of the open unit ball divided by its volume.
    Uniform,
    /// Linear interpolation between `(r, phi(r))` nodes, zero past the last.
    Table(Arc<Vec<(f64, f64)>>),
    Custom(CustomProfile),
}

/// Whether the super-level set `{phi > s}` is the open or the closed ball
/// of radius `theta(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelBall {
    Open,
    Closed,
    /// Non-lower-semicontinuous profile and `theta(s)` is not at a declared jump.
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRadius {
    pub radius: f64,
    pub ball: LevelBall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `(s, s^n phi(s))` for `s = 2^-k`, `k = 0..=64`.
    pub toward_zero: Vec<(f64, f64)>,
    /// `(s, s^n phi(s))` for `s = 2^k`, `k = 0..=64`.
    pub toward_infinity: Vec<(f64, f64)>,
    pub limit_at_zero: f64,
    pub limit_at_infinity: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub sup: f64,
    /// `(t, |x|)` where the grid sup is attained.
    pub argmax: (f64, f64),
    /// Sup on the refined, widened grid.
    pub refined_sup: f64,
    /// The refined sup exceeds the first by more than `1e-3` relative.
    pub divergent: bool,
}

/// How [`KernelProfile::layer_cake`] evaluated the level-set integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerCakeRoute {
    /// `m(B(0,1)) int_0^phi(0) theta(s)^n ds` with bisection `theta`.
    LevelSets,
    /// Infinite peak: the radial integral (Fubini) instead.
    Radial,
}

/// A radial kernel `amplitude * shape` in dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    dim: Dim,
    shape: ProfileShape,
    amplitude: f64,
}

impl KernelProfile {
    pub fn new(dim: Dim, shape: ProfileShape) -> Result<KernelProfile> {
        match &shape {
            ProfileShape::Table(nodes) => check_table(nodes)?,
            ProfileShape::Custom(c) => {
                if !(c.peak > 0.0) || c.peak.is_nan() {
                    return Err(Error::InvalidKernel(alloc::format!(
                        "custom profile `{}` needs phi(0) > 0",
                        c.label
                    )));
                }
            }
            _ => {}
        }
        Ok(KernelProfile {
            dim,
            shape,
            amplitude: 1.0,
        })
    }

    pub fn poisson(dim: Dim) -> KernelProfile {
        KernelProfile {
            dim,
            shape: ProfileShape::Poisson,
            amplitude: 1.0,
        }
    }

    pub fn gauss(dim: Dim) -> KernelProfile {
        KernelProfile {
            dim,
            shape: ProfileShape::Gauss,
            amplitude: 1.0,
        }
    }

    pub fn split_exp(dim: Dim) -> KernelProfile {
        KernelProfile {
            dim,
            shape: ProfileShape::SplitExp,
            amplitude: 1.0,
        }
    }

    pub fn uniform(dim: Dim) -> KernelProfile {
        KernelProfile {
            dim,
            shape: ProfileShape::Uniform,
            amplitude: 1.0,
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `factor * phi`.
    pub fn scaled_by(mut self, factor: f64) -> Result<KernelProfile> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "kernel amplitude must be positive, got {factor}"
            )));
        }
        self.amplitude *= factor;
        Ok(self)
    }

    /// The copy with unit `L^1` norm.
    pub fn normalized(self) -> Result<KernelProfile> {
        let norm = self.l1_norm()?.value;
        self.scaled_by(1.0 / norm)
    }

    /// Poisson constant `c_n = Gamma((n+1)/2) / pi^((n+1)/2)`.
    fn poisson_constant(&self) -> f64 {
        match self.dim {
            Dim::One => 1.0 / PI,
            Dim::Two => 0.5 / PI,
        }
    }

    fn gauss_constant(&self) -> f64 {
        match self.dim {
            Dim::One => 1.0 / (4.0 * PI).sqrt(),
            Dim::Two => 0.25 / PI,
        }
    }

    /// `phi` as a function of `r = |x|`.
    pub fn profile(&self, r: f64) -> f64 {
        let n = self.dim.n() as f64;
        let base = match &self.shape {
            ProfileShape::Poisson => self.poisson_constant() / (1.0 + r * r).powf(0.5 * (n + 1.0)),
            ProfileShape::Gauss => self.gauss_constant() * (-0.25 * r * r).exp(),
            ProfileShape::SplitExp => {
                if r <= 1.0 {
                    (-r).exp()
                } else {
                    (-2.0 * r).exp()
                }
            }
            ProfileShape::Uniform => {
                if r < 1.0 {
                    1.0 / self.dim.unit_ball_volume()
                } else {
                    0.0
                }
            }
            ProfileShape::Table(nodes) => table_eval(nodes, r),
            ProfileShape::Custom(c) => (c.f)(r),
        };
        self.amplitude * base
    }

    /// `ln phi(r)`, computed without underflow for the closed-form shapes.
    pub fn log_profile(&self, r: f64) -> f64 {
        let n = self.dim.n() as f64;
        let amp = self.amplitude.ln();
        match &self.shape {
            ProfileShape::Poisson => amp + self.poisson_constant().ln() - 0.5 * (n + 1.0) * (r * r).ln_1p(),
            ProfileShape::Gauss => amp + self.gauss_constant().ln() - 0.25 * r * r,
            ProfileShape::SplitExp => amp - if r <= 1.0 { r } else { 2.0 * r },
            _ => self.profile(r).ln(),
        }
    }

    /// `phi(0)`, possibly `+inf`.
    pub fn peak(&self) -> f64 {
        match &self.shape {
            ProfileShape::Custom(c) => self.amplitude * c.peak,
            _ => self.profile(0.0),
        }
    }

    pub fn is_lower_semicontinuous(&self) -> bool {
        match &self.shape {
            ProfileShape::SplitExp => false,
            ProfileShape::Custom(c) => c.lower_semicontinuous,
            _ => true,
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        match &self.shape {
            ProfileShape::Poisson | ProfileShape::Gauss | ProfileShape::SplitExp => true,
            ProfileShape::Uniform | ProfileShape::Table(_) => false,
            ProfileShape::Custom(c) => c.strictly_positive,
        }
    }

    /// Radii where the profile jumps.
    pub fn jumps(&self) -> Vec<f64> {
        match &self.shape {
            ProfileShape::SplitExp | ProfileShape::Uniform => alloc::vec![1.0],
            ProfileShape::Table(nodes) => {
                let last = nodes[nodes.len() - 1];
                if last.1 > 0.0 {
                    alloc::vec![last.0]
                } else {
                    Vec::new()
                }
            }
            ProfileShape::Custom(c) => c.jumps.clone(),
            _ => Vec::new(),
        }
    }

    /// Radii where the profile jumps or has a kink.
    pub fn radial_breaks(&self) -> Vec<f64> {
        match &self.shape {
            ProfileShape::Table(nodes) => nodes.iter().map(|p| p.0).collect(),
            _ => self.jumps(),
        }
    }

    /// Radius beyond which the profile vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.shape {
            ProfileShape::Uniform => Some(1.0),
            ProfileShape::Table(nodes) => Some(nodes[nodes.len() - 1].0),
            _ => None,
        }
    }

    /// `phi_t(x) = t^-n phi(|x| / t)`.
    pub fn eval_scaled(&self, t: f64, x: Point) -> Result<f64> {
        Ok(self.scaled(t)?.eval(x))
    }

    pub fn scaled(&self, t: f64) -> Result<ScaledKernel<'_>> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("scale t must be positive, got {t}")));
        }
        Ok(ScaledKernel { base: self, t })
    }

    /// Closed-form level radius where one is known.
    pub fn closed_form_theta(&self, s: f64) -> Option<f64> {
        let n = self.dim.n() as f64;
        let s = s / self.amplitude;
        match &self.shape {
            ProfileShape::Poisson => {
                let q = (self.poisson_constant() / s).powf(2.0 / (n + 1.0));
                Some((q - 1.0).max(0.0).sqrt())
            }
            ProfileShape::Gauss => Some((-4.0 * (s / self.gauss_constant()).ln()).max(0.0).sqrt()),
            ProfileShape::SplitExp => Some(if s >= (-1.0f64).exp() {
                -s.ln()
            } else if s >= (-2.0f64).exp() {
                1.0
            } else {
                -0.5 * s.ln()
            }),
            ProfileShape::Custom(c) => c.theta.as_ref().map(|th| th(s)),
            _ => None,
        }
    }

    /// `int_{R^n} phi dm = omega_{n-1} int_0^inf phi(s) s^(n-1) ds`.
    ///
    /// Geometric panels `[2^k, 2^(k+1)]` are added until `s^n phi(s)` falls
    /// below `1e-16`; a profile that never gets there is reported as
    /// [`Error::DivergentTail`].
    pub fn l1_norm(&self) -> Result<Estimate<f64>> {
        let tol = Tolerance { abs: 1e-13, rel: 1e-13 };
        self.radial_integral(|s| self.profile(s), tol)
    }

    /// `omega_{n-1} int_0^inf g(s) s^(n-1) ds` for a `g` dominated by `phi`.
    fn radial_integral<G: Fn(f64) -> f64>(&self, g: G, tol: Tolerance) -> Result<Estimate<f64>> {
        let n = self.dim.n() as i32;
        let weight = |s: f64| g(s) * s.powi(n - 1);
        let breaks = self.radial_breaks();
        let omega = self.dim.sphere_measure();
        let mut total = 0.0;
        let mut err = 0.0;
        let mut lo = 0.0;
        let mut k = INNER_EXPONENT;
        loop {
            let hi = libm::ldexp(1.0, k);
            let est = integrate_with_breaks(weight, lo, hi, &breaks, tol)?;
            total += est.value;
            err += est.error;
            let edge = self.log_profile(hi) + n as f64 * hi.ln();
            let vanished = self.support_radius().is_some_and(|r| hi >= r);
            if vanished || (k >= 0 && edge < TAIL_CUTOFF.ln()) {
                // the remaining tail is of the order of s^n phi(s) at the cut
                if !vanished {
                    err += edge.exp();
                }
                break;
            }
            if k >= OUTER_EXPONENT {
                return Err(Error::DivergentTail {
                    radius: hi,
                    value: edge.exp(),
                });
            }
            lo = hi;
            k += 1;
        }
        Ok(Estimate::new(omega * total, omega * err))
    }

    /// Fourier transform `int phi(u) cos(kappa u_1) du` at a wave vector of
    /// length `kappa`.
    pub fn fourier(&self, kappa: f64) -> Result<Estimate<f64>> {
        let kappa = kappa.abs();
        match &self.shape {
            ProfileShape::Poisson => Ok(Estimate::exact(self.amplitude * (-kappa).exp())),
            ProfileShape::Gauss => Ok(Estimate::exact(self.amplitude * (-kappa * kappa).exp())),
            _ => {
                let tol = Tolerance { abs: 1e-13, rel: 1e-13 };
                match self.dim {
                    Dim::One => self.radial_integral(|s| self.profile(s) * (kappa * s).cos(), tol),
                    Dim::Two => self.radial_integral(|s| self.profile(s) * libm::j0(kappa * s), tol),
                }
            }
        }
    }

    /// Tabulates `s^n phi(s)` on `2^-k` and `2^k`, `k = 0..=64`; passes when
    /// both ends fall below `1e-8`.
    pub fn decay_check(&self) -> DecayReport {
        let n = self.dim.n() as f64;
        let g = |s: f64| {
            let v = (n * s.ln() + self.log_profile(s)).exp();
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let toward_zero: Vec<(f64, f64)> = (0..=64)
            .map(|k| {
                let s = libm::ldexp(1.0, -k);
                (s, g(s))
            })
            .collect();
        let toward_infinity: Vec<(f64, f64)> = (0..=64)
            .map(|k| {
                let s = libm::ldexp(1.0, k);
                (s, g(s))
            })
            .collect();
        let limit_at_zero = toward_zero[64].1;
        let limit_at_infinity = toward_infinity[64].1;
        DecayReport {
            pass: limit_at_zero < 1e-8 && limit_at_infinity < 1e-8,
            toward_zero,
            toward_infinity,
            limit_at_zero,
            limit_at_infinity,
        }
    }

    /// `sup { phi_t(x) / phi(x) : t in t_grid, |x| in x_grid }` together with
    /// the maximizing pair.
    pub fn comparison_sup(&self, t_grid: &[f64], x_grid: &[f64]) -> Result<(f64, (f64, f64))> {
        if !self.is_strictly_positive() {
            return Err(Error::InvalidKernel(
                "the comparison condition needs a strictly positive profile".into(),
            ));
        }
        if t_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) || x_grid.iter().any(|r| !(*r > 1.0)) {
            return Err(Error::InvalidParameter(
                "comparison grids need t in (0, 1) and |x| > 1".into(),
            ));
        }
        let n = self.dim.n() as f64;
        let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
        for &r in x_grid {
            let base = self.log_profile(r);
            if !base.is_finite() {
                return Err(Error::InvalidKernel(alloc::format!("phi({r}) is not positive")));
            }
            for &t in t_grid {
                let log_ratio = -n * t.ln() + self.log_profile(r / t) - base;
                if log_ratio > best.0 {
                    best = (log_ratio, (t, r));
                }
            }
        }
        Ok((best.0.exp(), best.1))
    }

    /// Grid estimate of the comparison constant: `t` geometric in
    /// `[1e-4, 1 - 1e-4]`, `|x|` geometric in `[1 + 1e-4, 1e4]`, 256 points
    /// each, then 512 points on the grid widened by a decade at the open ends.
    pub fn comparison_constant(&self) -> Result<ComparisonReport> {
        let coarse_t = crate::measure::geometric_grid(1e-4, 1.0 - 1e-4, 256);
        let coarse_x = crate::measure::geometric_grid(1.0 + 1e-4, 1e4, 256);
        let (sup, argmax) = self.comparison_sup(&coarse_t, &coarse_x)?;
        let fine_t = crate::measure::geometric_grid(1e-5, 1.0 - 1e-4, 512);
        let fine_x = crate::measure::geometric_grid(1.0 + 1e-4, 1e5, 512);
        let (refined_sup, _) = self.comparison_sup(&fine_t, &fine_x)?;
        Ok(ComparisonReport {
            sup,
            argmax,
            refined_sup,
            divergent: !(refined_sup <= sup * (1.0 + 1e-3)),
        })
    }

    /// `theta(s) = sup { r : phi(r) > s }` by bisection, with the open/closed
    /// status of `{phi > s}`.
    pub fn level_radius(&self, s: f64) -> Result<LevelRadius> {
        let peak = self.peak();
        if !(s > 0.0 && s < peak) {
            return Err(Error::InvalidParameter(alloc::format!(
                "level {s} is outside (0, phi(0)) = (0, {peak})"
            )));
        }
        let above = |r: f64| self.profile(r) > s;
        let mut lo = 0.0;
        let mut hi = 1.0;
        while above(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::InvalidKernel(alloc::format!(
                    "phi stays above {s} out to r = 1e300"
                )));
            }
        }
        // invariant: phi(lo) > s (or lo = 0), phi(hi) <= s
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if above(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut radius = 0.5 * (lo + hi);
        let snap = self
            .jumps()
            .into_iter()
            .find(|&j| (j - radius).abs() <= 1e-12 * j.max(1.0));
        let ball = if let Some(j) = snap {
            radius = j;
            if self.profile(j) > s {
                LevelBall::Closed
            } else {
                LevelBall::Open
            }
        } else if self.is_lower_semicontinuous() || self.profile(lo) - self.profile(hi) <= 1e-9 * s {
            LevelBall::Open
        } else {
            LevelBall::Ambiguous
        };
        Ok(LevelRadius { radius, ball })
    }

    /// `m(B(0, 1)) int_0^phi(0) theta(s)^n ds`, the layer-cake form of
    /// `int phi dm`, evaluated on geometric `s`-panels toward `0` with
    /// bisection `theta`. An infinite peak falls back to the radial integral.
    pub fn layer_cake(&self) -> Result<(Estimate<f64>, LayerCakeRoute)> {
        let peak = self.peak();
        if !peak.is_finite() {
            return Ok((self.l1_norm()?, LayerCakeRoute::Radial));
        }
        let n = self.dim.n() as i32;
        let unit = self.dim.unit_ball_volume();
        // levels where theta has a kink: the one-sided values at jumps
        let mut level_breaks = Vec::new();
        for j in self.jumps() {
            level_breaks.push(self.profile(j));
            level_breaks.push(self.profile(j * (1.0 + 1e-12) + 1e-300));
        }
        if let ProfileShape::Table(nodes) = &self.shape {
            level_breaks.extend(nodes.iter().map(|p| self.amplitude * p.1));
        }
        let mut failure = None;
        let integrand = |s: f64| match self.level_radius(s) {
            Ok(l) => l.radius.powi(n),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let mut integrand = integrand;
        let tol = Tolerance { abs: 1e-12, rel: 1e-12 };
        let mut total = 0.0;
        let mut err = 0.0;
        let mut hi = peak;
        loop {
            let lo = 0.5 * hi;
            let est = integrate_with_breaks(&mut integrand, lo, hi, &level_breaks, tol)?;
            total += est.value;
            err += est.error;
            hi = lo;
            if !self.is_strictly_positive() && self.support_radius().is_some() {
                // theta is bounded by the support radius
                let r = self.support_radius().unwrap_or(0.0);
                if hi * r.powi(n) < 1e-15 {
                    err += hi * r.powi(n);
                    break;
                }
            } else {
                // what is left is at most about s theta(s)^n, up to a constant
                let left = hi * self.level_radius(hi)?.radius.powi(n);
                if left < 1e-13 {
                    err += 4.0 * left;
                    break;
                }
            }
            if hi < 1e-300 {
                return Err(Error::DivergentTail {
                    radius: f64::INFINITY,
                    value: hi,
                });
            }
        }
        if let Some(e) = failure {
            return Err(e);
        }
        Ok((Estimate::new(unit * total, unit * err), LayerCakeRoute::LevelSets))
    }
}

/// `phi_t` for a fixed `t > 0`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledKernel<'a> {
    pub base: &'a KernelProfile,
    pub t: f64,
}

impl ScaledKernel<'_> {
    pub fn eval(&self, x: Point) -> f64 {
        self.eval_radius(x.norm())
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        self.base.profile(r / self.t) / self.base.dim.pow(self.t)
    }
}

fn check_table(nodes: &[(f64, f64)]) -> Result<()> {
    let bad = |msg: &str| Err(Error::InvalidKernel(alloc::format!("table profile: {msg}")));
    if nodes.len() < 2 {
        return bad("needs at least two nodes");
    }
    if nodes[0].0 != 0.0 {
        return bad("first node must be at r = 0");
    }
    if nodes.iter().any(|p| !p.0.is_finite() || !p.1.is_finite() || p.1 < 0.0) {
        return bad("nodes must be finite with phi >= 0");
    }
    if nodes.windows(2).any(|w| !(w[1].0 > w[0].0) || w[1].1 > w[0].1) {
        return bad("radii must increase and values must not increase");
    }
    if !(nodes[0].1 > 0.0) {
        return bad("phi(0) must be positive");
    }
    Ok(())
}

fn table_eval(nodes: &[(f64, f64)], r: f64) -> f64 {
    let last = nodes[nodes.len() - 1];
    if r > last.0 {
        return 0.0;
    }
    let i = nodes.partition_point(|p| p.0 <= r);
    if i == 0 {
        return nodes[0].1;
    }
    if i >= nodes.len() {
        return last.1;
    }
    let (r0, v0) = nodes[i - 1];
    let (r1, v1) = nodes[i];
    v0 + (v1 - v0) * (r - r0) / (r1 - r0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn custom(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, peak: f64) -> CustomProfile {
        CustomProfile {
            label: label.into(),
            f: Arc::new(f),
            peak,
            lower_semicontinuous: true,
            strictly_positive: true,
            jumps: Vec::new(),
            theta: None,
        }
    }

    #[test]
    fn peaks() {
        assert!((KernelProfile::poisson(Dim::One).eval_scaled(1.0, Point::d1(0.0)).unwrap() - 1.0 / PI).abs() < 1e-16);
        let g2 = KernelProfile::gauss(Dim::Two);
        assert!((g2.peak() - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!(g2.eval_scaled(0.0, Point::ORIGIN).is_err());
        assert!(g2.eval_scaled(-1.0, Point::ORIGIN).is_err());
    }

    #[test]
    fn scaling() {
        let p = KernelProfile::poisson(Dim::One);
        // t^-1 phi(x/t) = (1/pi) t / (t^2 + x^2)
        for &(x, t) in &[(0.3, 0.1), (2.0, 5.0), (-1.0, 1e-3)] {
            let oracle = t / (PI * (t * t + x * x));
            let v = p.eval_scaled(t, Point::d1(x)).unwrap();
            assert!((v - oracle).abs() <= 1e-14 * oracle);
        }
        let p2 = KernelProfile::poisson(Dim::Two);
        let (x, t) = (Point::d2(0.3, -0.4), 0.2);
        let oracle = 0.5 / PI * t / (t * t + 0.25f64).powf(1.5);
        assert!((p2.eval_scaled(t, x).unwrap() - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn log_profile_agrees() {
        for k in [KernelProfile::poisson(Dim::Two), KernelProfile::gauss(Dim::One), KernelProfile::split_exp(Dim::One)] {
            for r in [0.0, 0.5, 1.0, 1.5, 7.0] {
                assert!((k.log_profile(r) - k.profile(r).ln()).abs() < 1e-12);
            }
        }
        // far out the profile underflows but its logarithm does not
        assert!(KernelProfile::gauss(Dim::One).log_profile(1e3).is_finite());
    }

    #[test]
    fn norms_of_builtins() {
        for dim in [Dim::One, Dim::Two] {
            for k in [KernelProfile::poisson(dim), KernelProfile::gauss(dim), KernelProfile::uniform(dim)] {
                let est = k.l1_norm().unwrap();
                assert!((est.value - 1.0).abs() < 1e-8, "{k:?}: {}", est.value);
                assert!(est.error < 1e-8);
            }
        }
    }

    #[test]
    fn split_exp_norm() {
        // 2 (int_0^1 e^-s ds + int_1^inf e^-2s ds)
        let oracle = 2.0 * ((1.0 - (-1.0f64).exp()) + 0.5 * (-2.0f64).exp());
        let k = KernelProfile::split_exp(Dim::One);
        assert!((k.l1_norm().unwrap().value - oracle).abs() < 1e-12);
        let unit = k.normalized().unwrap();
        assert!((unit.l1_norm().unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_profile() {
        let nodes = alloc::vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)];
        let k = KernelProfile::new(Dim::One, ProfileShape::Table(Arc::new(nodes))).unwrap();
        assert_eq!(k.profile(0.5), 0.75);
        assert_eq!(k.profile(3.0), 0.0);
        // 2 (0.75 + 0.25)
        assert!((k.l1_norm().unwrap().value - 2.0).abs() < 1e-13);
        let bad = alloc::vec![(0.0, 1.0), (1.0, 2.0)];
        assert!(KernelProfile::new(Dim::One, ProfileShape::Table(Arc::new(bad))).is_err());
    }

    #[test]
    fn divergent_tail() {
        let k = KernelProfile::new(Dim::One, ProfileShape::Custom(custom("min", |s: f64| s.recip().min(1.0), 1.0))).unwrap();
        assert!(matches!(k.l1_norm(), Err(Error::DivergentTail { .. })));
        let d = k.decay_check();
        assert!(!d.pass);
        assert!((d.limit_at_infinity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decay() {
        let d = KernelProfile::poisson(Dim::One).decay_check();
        assert!(d.pass);
        for &(s, v) in &d.toward_infinity {
            let oracle = s / (PI * (1.0 + s * s));
            assert!((v - oracle).abs() <= 1e-12 * oracle);
        }
        assert!(KernelProfile::gauss(Dim::Two).decay_check().pass);
    }

    #[test]
    fn comparison() {
        let p = KernelProfile::poisson(Dim::One).comparison_constant().unwrap();
        assert!(p.sup <= 1.0 && p.sup > 0.999);
        assert!(!p.divergent);
        // per-x maximum of t^-1 exp(-(x^2/4)(t^-2 - 1)) at |x| = 1 is sqrt(2) e^-1/4
        let oracle = 2f64.sqrt() * (-0.25f64).exp();
        let g = KernelProfile::gauss(Dim::One).comparison_constant().unwrap();
        assert!((g.sup - oracle).abs() < 1e-3);
        assert!((g.refined_sup - g.sup).abs() < 1e-3);
        assert!(!g.divergent);
        assert!(matches!(
            KernelProfile::uniform(Dim::One).comparison_constant(),
            Err(Error::InvalidKernel(_))
        ));
    }

    #[test]
    fn plateau_fails_comparison() {
        // phi = 1 on [0, 1e6], then Gaussian: the ratio grows like t^-1
        let f = |s: f64| if s <= 1e6 { 1.0 } else { (-(s - 1e6) * (s - 1e6)).exp() };
        let k = KernelProfile::new(Dim::One, ProfileShape::Custom(custom("plateau", f, 1.0))).unwrap();
        assert!(k.comparison_constant().unwrap().divergent);
    }

    #[test]
    fn poisson_level_radius() {
        let k = KernelProfile::poisson(Dim::One);
        for i in 1..50 {
            let s = i as f64 / (50.0 * PI);
            let oracle = (1.0 / (PI * s) - 1.0).sqrt();
            let l = k.level_radius(s).unwrap();
            assert!((l.radius - oracle).abs() < 1e-10, "s = {s}");
            assert_eq!(l.ball, LevelBall::Open);
            assert!((k.closed_form_theta(s).unwrap() - oracle).abs() < 1e-12);
        }
        assert!(k.level_radius(0.0).is_err());
        assert!(k.level_radius(1.0 / PI).is_err());
    }

    #[test]
    fn split_exp_level_sets() {
        let k = KernelProfile::split_exp(Dim::One);
        let (e1, e2) = ((-1.0f64).exp(), (-2.0f64).exp());
        let l = k.level_radius(0.5 * (e1 + e2)).unwrap();
        assert_eq!(l, LevelRadius { radius: 1.0, ball: LevelBall::Closed });
        let l = k.level_radius(0.5).unwrap();
        assert!((l.radius - 2f64.ln()).abs() < 1e-14);
        assert_eq!(l.ball, LevelBall::Open);
        let l = k.level_radius(0.01).unwrap();
        assert!((l.radius - 0.5 * 100f64.ln()).abs() < 1e-14);
        assert_eq!(l.ball, LevelBall::Open);
        assert_eq!(k.level_radius(e1).unwrap().ball, LevelBall::Open);
    }

    #[test]
    fn level_set_consistency() {
        for k in [KernelProfile::poisson(Dim::Two), KernelProfile::gauss(Dim::One)] {
            let mut prev = f64::INFINITY;
            for i in 1..40 {
                let s = k.peak() * i as f64 / 40.0;
                let th = k.level_radius(s).unwrap().radius;
                assert!(th <= prev);
                prev = th;
                assert!(k.profile(0.999 * th) > s);
                assert!(k.profile(1.001 * th) <= s);
            }
        }
    }

    #[test]
    fn layer_cake_matches_norm() {
        for dim in [Dim::One, Dim::Two] {
            for k in [KernelProfile::poisson(dim), KernelProfile::gauss(dim)] {
                let (est, route) = k.layer_cake().unwrap();
                assert_eq!(route, LayerCakeRoute::LevelSets);
                assert!((est.value - 1.0).abs() < 1e-6, "{k:?}: {}", est.value);
            }
        }
        let twice = KernelProfile::gauss(Dim::Two).scaled_by(2.0).unwrap();
        assert!((twice.layer_cake().unwrap().0.value - 2.0).abs() < 2e-6);
        let se = KernelProfile::split_exp(Dim::One);
        let (est, _) = se.layer_cake().unwrap();
        assert!((est.value - se.l1_norm().unwrap().value).abs() < 1e-6);
        let u = KernelProfile::uniform(Dim::Two);
        assert!((u.layer_cake().unwrap().0.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infinite_peak_layer_cake() {
        // phi(s) = s^-1/2 e^-s / (2 sqrt(pi)) in n = 1 has unit mass
        let f = |s: f64| (-s).exp() / (2.0 * (PI * s).sqrt());
        let k = KernelProfile::new(Dim::One, ProfileShape::Custom(custom("cusp", f, f64::INFINITY))).unwrap();
        let (est, route) = k.layer_cake().unwrap();
        assert_eq!(route, LayerCakeRoute::Radial);
        assert!((est.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fourier_transforms() {
        // the uniform kernel on (-1, 1) has transform sin(k) / k
        let u = KernelProfile::uniform(Dim::One);
        for k in [0.0, 0.5, 3.0] {
            let oracle = if k == 0.0 { 1.0 } else { f64::sin(k) / k };
            assert!((u.fourier(k).unwrap().value - oracle).abs() < 1e-12);
        }
        // 2 int_0^1 e^-s cos(ks) ds + 2 int_1^inf e^-2s cos(ks) ds
        let k = 2.0f64;
        let part = |a: f64, lo: f64, hi: f64| {
            let prim = |s: f64| (-a * s).exp() * (k * (k * s).sin() - a * (k * s).cos()) / (a * a + k * k);
            prim(hi) - prim(lo)
        };
        let oracle = 2.0 * (part(1.0, 0.0, 1.0) + part(2.0, 1.0, 1e3));
        let se = KernelProfile::split_exp(Dim::One);
        assert!((se.fourier(k).unwrap().value - oracle).abs() < 1e-12);
        // 2-D: the Gaussian done numerically against its closed form
        let g = KernelProfile::gauss(Dim::Two);
        let shape = ProfileShape::Custom(custom("g", move |s: f64| (-0.25 * s * s).exp() / (4.0 * PI), 0.25 / PI));
        let num = KernelProfile::new(Dim::Two, shape).unwrap();
        for k in [0.3, 1.7] {
            assert!((num.fourier(k).unwrap().value - g.fourier(k).unwrap().value).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_mass_invariance() {
        let k = KernelProfile::poisson(Dim::Two);
        for t in [0.01, 0.3, 1.0, 7.0] {
            let sk = k.scaled(t).unwrap();
            let mut total = 0.0;
            let mut lo = 0.0;
            for j in -40..60 {
                let hi = t * libm::ldexp(1.0, j);
                total += crate::quadrature::integrate(|s| sk.eval_radius(s) * s, lo, hi, Tolerance::default())
                    .unwrap()
                    .value;
                lo = hi;
            }
            assert!((2.0 * PI * total - 1.0).abs() < 1e-8, "t = {t}");
        }
    }
}
