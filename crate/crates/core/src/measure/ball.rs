//! Quadrature of density fields over open balls: adaptive on the interval
//! in `n = 1`, nested adaptive in (angle, radius) in `n = 2`.

use alloc::vec::Vec;
use core::f64::consts::PI;


use super::density::{Density, RaySpan};
use crate::geometry::{wrap_angle, Dim, Point};
use crate::quadrature::{integrate_with_breaks, Estimate, Tolerance};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Collects the density terms whose geometry drives breakpoints.
pub(crate) struct FieldHints<'a> {
    pub terms: Vec<&'a Density>,
}

impl<'a> FieldHints<'a> {
    pub fn breaks_1d(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for d in &self.terms {
            d.breaks_1d(&mut out);
        }
        out
    }

    /// Union of the nonzero spans of every term along a ray, plus breakpoints.
    pub fn ray(&self, origin: Point, dir: Point, breaks: &mut Vec<f64>) -> RaySpan {
        let mut span: Option<RaySpan> = None;
        for d in &self.terms {
            let s = d.ray_hints(origin, dir, breaks);
            if s.is_empty() {
                continue;
            }
            span = Some(match span {
                None => s,
                Some(u) => RaySpan {
                    lo: u.lo.min(s.lo),
                    hi: u.hi.max(s.hi),
                },
            });
        }
        span.unwrap_or(RaySpan::EMPTY)
    }

    pub fn kink_angles(&self, origin: Point, radius: Option<f64>) -> Vec<f64> {
        let mut out = Vec::new();
        for d in &self.terms {
            d.kink_angles(origin, radius, &mut out);
        }
        for a in &mut out {
            *a = wrap_angle(*a);
        }
        out
    }
}

/// `int_{B(center, radius)} f dm`.
///
/// The tolerance applies to the ball average, so tiny balls are resolved
/// to the same relative quality as large ones. When `vanishes_off_support`
/// is set, `f` is known to vanish wherever every term vanishes.
pub(crate) fn integrate_over_ball<F: FnMut(Point) -> f64>(
    dim: Dim,
    hints: &FieldHints<'_>,
    center: Point,
    radius: f64,
    mut f: F,
    vanishes_off_support: bool,
    tol: Tolerance,
) -> Result<Estimate<f64>> {
    if radius == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    match dim {
        Dim::One => {
            let (a, b) = (center.x() - radius, center.x() + radius);
            let breaks = hints.breaks_1d();
            integrate_with_breaks(|x| f(Point::d1(x)), a, b, &breaks, tol.scaled(2.0 * radius))
        }
        Dim::Two => {
            let angles = hints.kink_angles(center, Some(radius));
            let inner_tol = tol.scaled(0.25);
            let mut inner_err_max: f64 = 0.0;
            let mut failure: Option<Error> = None;
            let mut breaks = Vec::new();
            let outer = integrate_with_breaks(
                |theta| {
                    if failure.is_some() {
                        return 0.0;
                    }
                    let dir = Point::polar(theta);
                    breaks.clear();
                    let (lo, hi) = if vanishes_off_support {
                        let span = hints.ray(center, dir, &mut breaks);
                        if span.is_empty() {
                            return 0.0;
                        }
                        ((span.lo / radius).max(0.0), (span.hi / radius).min(1.0))
                    } else {
                        hints.ray(center, dir, &mut breaks);
                        (0.0, 1.0)
                    };
                    if hi <= lo {
                        return 0.0;
                    }
                    for b in &mut breaks {
                        *b /= radius;
                    }
                    let inner = integrate_with_breaks(
                        |u| u * f(center + dir * (radius * u)),
                        lo,
                        hi,
                        &breaks,
                        inner_tol,
                    );
                    match inner {
                        Ok(est) => {
                            inner_err_max = inner_err_max.max(est.error);
                            est.value
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
                tol.scaled(PI * 0.5),
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let outer = outer?;
            let r2 = radius * radius;
            Ok(Estimate::new(
                r2 * outer.value,
                r2 * (outer.error + 2.0 * PI * inner_err_max),
            ))
        }
    }
}
