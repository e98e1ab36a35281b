//! Points, dimensions, and Euclidean ball volumes in `R^1` and `R^2`.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};


use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Ambient dimension. Only `n = 1` and `n = 2` are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_n(n: usize) -> Result<Dim> {
        match n {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::InvalidParameter(alloc::format!(
                "dimension must be 1 or 2, got {n}"
            ))),
        }
    }

    /// `m(B(0, 1))`.
    pub fn unit_ball_volume(self) -> f64 {
        match self {
            Dim::One => 2.0,
            Dim::Two => PI,
        }
    }

    /// `m(B(0, r)) = m(B(0, 1)) r^n`.
    pub fn ball_volume(self, radius: f64) -> f64 {
        self.unit_ball_volume() * self.pow(radius)
    }

    /// Surface measure of the unit sphere `S^{n-1}` (two points when `n = 1`).
    pub fn sphere_measure(self) -> f64 {
        match self {
            Dim::One => 2.0,
            Dim::Two => 2.0 * PI,
        }
    }

    /// `r^n`.
    pub fn pow(self, r: f64) -> f64 {
        match self {
            Dim::One => r,
            Dim::Two => r * r,
        }
    }

    /// Coordinate unit vectors `e_1, ..., e_n`.
    pub fn axes(self) -> &'static [Point] {
        const ONE: [Point; 1] = [Point([1.0, 0.0])];
        const TWO: [Point; 2] = [Point([1.0, 0.0]), Point([0.0, 1.0])];
        match self {
            Dim::One => &ONE,
            Dim::Two => &TWO,
        }
    }
}

/// A point of `R^n`, stored with two coordinates; the second is zero in `R^1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point(pub [f64; 2]);

impl Point {
    pub const ORIGIN: Point = Point([0.0, 0.0]);

    pub fn d1(x: f64) -> Point {
        Point([x, 0.0])
    }

    pub fn d2(x: f64, y: f64) -> Point {
        Point([x, y])
    }

    /// Builds a point from `n` coordinates, validating length and finiteness.
    pub fn from_coords(coords: &[f64]) -> Result<(Point, Dim)> {
        let dim = Dim::from_n(coords.len())?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidQuery(alloc::format!(
                "non-finite coordinate in {coords:?}"
            )));
        }
        let mut p = Point::ORIGIN;
        p.0[..coords.len()].copy_from_slice(coords);
        Ok((p, dim))
    }

    /// Builds a point that must live in `dim`.
    pub fn in_dim(coords: &[f64], dim: Dim) -> Result<Point> {
        let (p, found) = Point::from_coords(coords)?;
        if found != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found,
            });
        }
        Ok(p)
    }

    /// Unit vector at angle `theta` in the plane.
    pub fn polar(theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point([c, s])
    }

    pub fn x(self) -> f64 {
        self.0[0]
    }

    pub fn y(self) -> f64 {
        self.0[1]
    }

    pub fn coords(&self, dim: Dim) -> &[f64] {
        &self.0[..dim.n()]
    }

    pub fn dot(self, other: Point) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn norm(self) -> f64 {
        self.0[0].hypot(self.0[1])
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }

    /// Polar angle in `(-pi, pi]`.
    pub fn angle(self) -> f64 {
        self.0[1].atan2(self.0[0])
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point([-self.0[0], -self.0[1]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point([self.0[0] * rhs, self.0[1] * rhs])
    }
}

/// Normalizes an angle into `[0, 2 pi)`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let tau = 2.0 * PI;
    let w = theta % tau;
    if w < 0.0 {
        w + tau
    } else {
        w
    }
}

/// Parameters `s` where the ray `origin + s dir` (unit `dir`) crosses the
/// circle `|p - center| = radius`, sorted, possibly empty.
pub(crate) fn ray_circle_hits(origin: Point, dir: Point, center: Point, radius: f64) -> [Option<f64>; 2] {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.dot(oc) - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return [None, None];
    }
    let root = disc.sqrt();
    [Some(-b - root), Some(-b + root)]
}

/// Angles (seen from `origin`) at which the circle `|p - origin| = r`
/// meets the circle `|p - center| = radius`, plus the two angles of rays
/// from `origin` tangent to the second circle when `origin` lies outside it.
pub(crate) fn circle_event_angles(origin: Point, r: Option<f64>, center: Point, radius: f64) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::new();
    let d_vec = center - origin;
    let d = d_vec.norm();
    if d == 0.0 {
        return out;
    }
    let base = d_vec.angle();
    if d > radius {
        let half = (radius / d).asin();
        out.push(base - half);
        out.push(base + half);
    }
    if let Some(r) = r {
        // law of cosines for the intersection points of the two circles
        let cos_a = (r * r + d * d - radius * radius) / (2.0 * r * d);
        if cos_a.abs() < 1.0 {
            let a = cos_a.acos();
            out.push(base - a);
            out.push(base + a);
        }
    }
    out
}
