//! Absolutely continuous components `f dm` and the geometric hints
//! (breakpoints, ray supports, kink angles) the quadratures use.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;


use crate::geometry::{circle_event_angles, ray_circle_hits, Dim, Point};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Regularity tag carried as metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    PiecewiseConstant,
    Continuous,
    Smooth,
}

/// Radial growth bound: `|f(eta)| <= bound(rho)` whenever `|eta| <= rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    Bounded(f64),
    /// `(rho + offset)^exponent`.
    Power { offset: f64, exponent: f64 },
    /// `exp(rate * rho^2)`.
    ExpSquare { rate: f64 },
    Unknown,
}

impl Growth {
    pub fn bound(&self, rho: f64) -> f64 {
        match *self {
            Growth::Bounded(b) => b,
            Growth::Power { offset, exponent } => (rho + offset).powf(exponent),
            Growth::ExpSquare { rate } => (rate * rho * rho).exp(),
            Growth::Unknown => f64::INFINITY,
        }
    }

    /// `ln bound(rho)`, finite where `bound` would overflow.
    pub fn log_bound(&self, rho: f64) -> f64 {
        match *self {
            Growth::Bounded(b) => b.ln(),
            Growth::Power { offset, exponent } => exponent * (rho + offset).ln(),
            Growth::ExpSquare { rate } => rate * rho * rho,
            Growth::Unknown => f64::INFINITY,
        }
    }
}

/// A user-supplied density. The growth bound must be honest: it is what
/// certifies convolution tail truncation.
#[derive(Clone)]
pub struct CustomDensity {
    pub label: String,
    pub f: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
    pub growth: Growth,
    pub smoothness: Smoothness,
    /// Jump/kink locations along the first axis (used in `n = 1`).
    pub breaks: Vec<f64>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("label", &self.label)
            .field("growth", &self.growth)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomDensity {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

/// Built-in density profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityShape {
    /// `f = 1`.
    Constant,
    /// Indicator of the closed box `[lo, hi]`.
    IndicatorBox { lo: Point, hi: Point },
    /// Indicator of `{eta : eta[axis] >= at}`.
    HalfSpace { axis: usize, at: f64 },
    /// `exp(-|eta - center|^2 / (2 width^2))`.
    GaussianBump { center: Point, width: f64 },
    /// `sin(frequency * eta_1 + phase)`.
    SineWave { frequency: f64, phase: f64 },
    /// `|eta - center|^exponent`, `exponent >= 0`.
    PowerNorm { center: Point, exponent: f64 },
    /// `exp(|eta|^2)`; locally integrable but with no tempered growth.
    ExpNormSq,
    Custom(CustomDensity),
}

impl DensityShape {
    pub(crate) fn check(&self, dim: Dim) -> Result<()> {
        let planar_ok = |p: &Point| dim == Dim::Two || p.y() == 0.0;
        let ok = match self {
            DensityShape::Constant | DensityShape::ExpNormSq | DensityShape::Custom(_) => true,
            DensityShape::IndicatorBox { lo, hi } => {
                planar_ok(lo)
                    && planar_ok(hi)
                    && lo.is_finite()
                    && hi.is_finite()
                    && lo.x() <= hi.x()
                    && lo.y() <= hi.y()
            }
            DensityShape::HalfSpace { axis, at } => *axis < dim.n() && at.is_finite(),
            DensityShape::GaussianBump { center, width } => {
                planar_ok(center) && center.is_finite() && *width > 0.0 && width.is_finite()
            }
            DensityShape::SineWave { frequency, phase } => frequency.is_finite() && phase.is_finite(),
            DensityShape::PowerNorm { center, exponent } => {
                planar_ok(center) && center.is_finite() && *exponent >= 0.0 && exponent.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "density {self:?} is not valid in n = {}",
                dim.n()
            )))
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        match self {
            DensityShape::Constant => 1.0,
            DensityShape::IndicatorBox { lo, hi } => {
                let inside = p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            DensityShape::HalfSpace { axis, at } => {
                if p.0[*axis] >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            DensityShape::GaussianBump { center, width } => {
                let d = p - *center;
                (-d.dot(d) / (2.0 * width * width)).exp()
            }
            DensityShape::SineWave { frequency, phase } => (frequency * p.x() + phase).sin(),
            DensityShape::PowerNorm { center, exponent } => p.dist(*center).powf(*exponent),
            DensityShape::ExpNormSq => p.dot(p).exp(),
            DensityShape::Custom(c) => (c.f)(p),
        }
    }

    pub fn growth(&self) -> Growth {
        match self {
            DensityShape::PowerNorm { center, exponent } => Growth::Power {
                offset: center.norm(),
                exponent: *exponent,
            },
            DensityShape::ExpNormSq => Growth::ExpSquare { rate: 1.0 },
            DensityShape::Custom(c) => c.growth,
            _ => Growth::Bounded(1.0),
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            DensityShape::IndicatorBox { .. } | DensityShape::HalfSpace { .. } => Smoothness::PiecewiseConstant,
            DensityShape::PowerNorm { .. } => Smoothness::Continuous,
            DensityShape::Custom(c) => c.smoothness,
            _ => Smoothness::Smooth,
        }
    }

    fn breaks_1d(&self, out: &mut Vec<f64>) {
        match self {
            DensityShape::IndicatorBox { lo, hi } => {
                out.push(lo.x());
                out.push(hi.x());
            }
            DensityShape::HalfSpace { at, .. } => out.push(*at),
            DensityShape::PowerNorm { center, .. } => out.push(center.x()),
            DensityShape::Custom(c) => out.extend_from_slice(&c.breaks),
            _ => {}
        }
    }
}

/// Interval `[lo, hi]` of ray parameters outside of which a term vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RaySpan {
    pub lo: f64,
    pub hi: f64,
}

impl RaySpan {
    pub const FULL: RaySpan = RaySpan {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const EMPTY: RaySpan = RaySpan { lo: 0.0, hi: 0.0 };

    fn intersect(self, lo: f64, hi: f64) -> RaySpan {
        RaySpan {
            lo: self.lo.max(lo),
            hi: self.hi.min(hi),
        }
    }

    pub fn is_empty(self) -> bool {
        !(self.hi > self.lo)
    }
}

/// Closed ball in the base frame of a density, used for restrictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedBall {
    pub center: Point,
    pub radius: f64,
}

/// A density profile placed in space: `xi -> shape(xi + shift)`, multiplied
/// by the indicator of every clip ball (clip balls live in the shape's frame).
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub shape: DensityShape,
    pub shift: Point,
    pub clips: Vec<ClosedBall>,
}

impl Density {
    pub fn new(shape: DensityShape) -> Density {
        Density {
            shape,
            shift: Point::ORIGIN,
            clips: Vec::new(),
        }
    }

    pub fn eval(&self, xi: Point) -> f64 {
        let eta = xi + self.shift;
        if self.clips.iter().all(|c| eta.dist(c.center) <= c.radius) {
            self.shape.eval(eta)
        } else {
            0.0
        }
    }

    /// Growth bound for the density in the current frame.
    pub fn growth_bound(&self, rho: f64) -> f64 {
        let mut b = self.shape.growth().bound(rho + self.shift.norm());
        for c in &self.clips {
            b = b.min(self.shape.growth().bound(c.center.norm() + c.radius));
        }
        b
    }

    /// `ln growth_bound(rho)`.
    pub fn log_growth_bound(&self, rho: f64) -> f64 {
        let g = self.shape.growth();
        let mut b = g.log_bound(rho + self.shift.norm());
        for c in &self.clips {
            b = b.min(g.log_bound(c.center.norm() + c.radius));
        }
        b
    }

    /// A ball (current frame) outside of which the density vanishes.
    pub fn bounding_ball(&self) -> Option<(Point, f64)> {
        let own = match &self.shape {
            DensityShape::IndicatorBox { lo, hi } => {
                let c = (*lo + *hi) * 0.5;
                Some((c, (*hi - *lo).norm() * 0.5))
            }
            _ => None,
        };
        let clip = self
            .clips
            .iter()
            .min_by(|a, b| a.radius.total_cmp(&b.radius))
            .map(|c| (c.center, c.radius));
        let best = match (own, clip) {
            (Some(a), Some(b)) => Some(if a.1 <= b.1 { a } else { b }),
            (a, b) => a.or(b),
        };
        best.map(|(c, r)| (c - self.shift, r))
    }

    /// Jump/kink locations along the line (current frame).
    pub(crate) fn breaks_1d(&self, out: &mut Vec<f64>) {
        let start = out.len();
        self.shape.breaks_1d(out);
        for c in &self.clips {
            out.push(c.center.x() - c.radius);
            out.push(c.center.x() + c.radius);
        }
        for b in &mut out[start..] {
            *b -= self.shift.x();
        }
    }

    /// Nonsmooth points along the ray `origin + s dir` (unit `dir`, `s > 0`)
    /// and the span of `s` where the density can be nonzero.
    pub(crate) fn ray_hints(&self, origin: Point, dir: Point, breaks: &mut Vec<f64>) -> RaySpan {
        let o = origin + self.shift;
        let mut span = RaySpan::FULL;
        match &self.shape {
            DensityShape::IndicatorBox { lo, hi } => {
                let mut enter = f64::NEG_INFINITY;
                let mut exit = f64::INFINITY;
                for axis in 0..2 {
                    let (a, b, p, d) = (lo.0[axis], hi.0[axis], o.0[axis], dir.0[axis]);
                    if d == 0.0 {
                        if p < a || p > b {
                            return RaySpan::EMPTY;
                        }
                    } else {
                        let s1 = (a - p) / d;
                        let s2 = (b - p) / d;
                        enter = enter.max(s1.min(s2));
                        exit = exit.min(s1.max(s2));
                    }
                }
                breaks.push(enter);
                breaks.push(exit);
                span = span.intersect(enter, exit);
            }
            DensityShape::HalfSpace { axis, at } => {
                let (p, d) = (o.0[*axis], dir.0[*axis]);
                if d == 0.0 {
                    if p < *at {
                        return RaySpan::EMPTY;
                    }
                } else {
                    let s = (at - p) / d;
                    breaks.push(s);
                    span = if d > 0.0 {
                        span.intersect(s, f64::INFINITY)
                    } else {
                        span.intersect(f64::NEG_INFINITY, s)
                    };
                }
            }
            DensityShape::PowerNorm { center, .. } => {
                breaks.push((*center - o).dot(dir));
            }
            _ => {}
        }
        for c in &self.clips {
            match ray_circle_hits(o, dir, c.center, c.radius) {
                [Some(s1), Some(s2)] => {
                    breaks.push(s1);
                    breaks.push(s2);
                    span = span.intersect(s1, s2);
                }
                _ => return RaySpan::EMPTY,
            }
        }
        span
    }

    /// Angles (seen from `origin`, current frame) where the radial integral
    /// over `[0, radius]` (or `[0, inf)` when `radius` is `None`) has kinks.
    pub(crate) fn kink_angles(&self, origin: Point, radius: Option<f64>, out: &mut Vec<f64>) {
        let o = origin + self.shift;
        let within = |p: Point| radius.is_none_or(|r| p.dist(o) < r);
        match &self.shape {
            DensityShape::IndicatorBox { lo, hi } => {
                let corners = [
                    Point::d2(lo.x(), lo.y()),
                    Point::d2(hi.x(), lo.y()),
                    Point::d2(hi.x(), hi.y()),
                    Point::d2(lo.x(), hi.y()),
                ];
                for c in corners {
                    if within(c) && c != o {
                        out.push((c - o).angle());
                    }
                }
                if let Some(r) = radius {
                    for (axis, value) in [(0, lo.x()), (0, hi.x()), (1, lo.y()), (1, hi.y())] {
                        for p in line_circle_points(o, r, axis, value) {
                            let other = 1 - axis;
                            if p.0[other] >= lo.0[other] && p.0[other] <= hi.0[other] {
                                out.push((p - o).angle());
                            }
                        }
                    }
                }
            }
            DensityShape::HalfSpace { axis, at } => match radius {
                Some(r) => {
                    for p in line_circle_points(o, r, *axis, *at) {
                        out.push((p - o).angle());
                    }
                }
                None => {
                    let along = if *axis == 0 { PI / 2.0 } else { 0.0 };
                    out.push(along);
                    out.push(along + PI);
                }
            },
            DensityShape::PowerNorm { center, .. } => {
                if within(*center) && *center != o {
                    out.push((*center - o).angle());
                }
            }
            _ => {}
        }
        for c in &self.clips {
            out.extend(circle_event_angles(o, radius, c.center, c.radius));
        }
    }
}

/// Points where the line `{p : p[axis] = value}` meets the circle `|p - o| = r`.
fn line_circle_points(o: Point, r: f64, axis: usize, value: f64) -> impl Iterator<Item = Point> {
    let off = value - o.0[axis];
    let h2 = r * r - off * off;
    let mut pts = [None, None];
    if h2 > 0.0 {
        let h = h2.sqrt();
        let other = 1 - axis;
        for (slot, sign) in pts.iter_mut().zip([-1.0, 1.0]) {
            let mut p = o;
            p.0[axis] = value;
            p.0[other] = o.0[other] + sign * h;
            *slot = Some(p);
        }
    }
    pts.into_iter().flatten()
}
