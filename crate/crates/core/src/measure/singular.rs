//! Measures on the line given by a nondecreasing right-continuous
//! distribution function, typically singular with respect to `m`.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::cantor::cantor;
#[allow(unused_imports)]
use num_traits::Float;

/// Relative offset used to approximate left limits `F(b-)`.
pub const LEFT_LIMIT_OFFSET: f64 = 1e-12;

#[derive(Clone)]
pub struct CustomCdf {
    pub label: String,
    /// Nondecreasing, right-continuous.
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `F` is constant on `(-inf, lo)` and on `[hi, inf)`.
    pub support: (f64, f64),
    /// No atoms. Left limits are then read off `F` directly.
    pub continuous: bool,
}

impl fmt::Debug for CustomCdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomCdf")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("continuous", &self.continuous)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomCdf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f) && self.support == other.support && self.continuous == other.continuous
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CdfShape {
    /// The middle-thirds Cantor function on `[0, 1]`.
    Cantor,
    Custom(CustomCdf),
}

impl CdfShape {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CdfShape::Cantor => cantor(x),
            CdfShape::Custom(c) => (c.f)(x),
        }
    }

    /// `F(x-)`; approximated at `x - 1e-12 scale` when `F` may jump.
    pub fn left_limit(&self, x: f64, scale: f64) -> f64 {
        if self.is_continuous() {
            self.eval(x)
        } else {
            self.eval(x - LEFT_LIMIT_OFFSET * scale)
        }
    }

    pub fn is_continuous(&self) -> bool {
        match self {
            CdfShape::Cantor => true,
            CdfShape::Custom(c) => c.continuous,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            CdfShape::Cantor => (0.0, 1.0),
            CdfShape::Custom(c) => c.support,
        }
    }
}

/// `xi -> F(xi + shift)`, optionally restricted to the closed interval
/// `clip` (expressed in the frame of `F`).
#[derive(Debug, Clone, PartialEq)]
pub struct SingularCdf {
    pub shape: CdfShape,
    pub shift: f64,
    pub clip: Option<(f64, f64)>,
}

impl SingularCdf {
    pub fn new(shape: CdfShape) -> SingularCdf {
        SingularCdf {
            shape,
            shift: 0.0,
            clip: None,
        }
    }

    /// Right-continuous distribution function in the current frame,
    /// normalized so that only differences matter.
    pub fn cdf(&self, xi: f64) -> f64 {
        let eta = xi + self.shift;
        match self.clip {
            None => self.shape.eval(eta),
            Some((a, b)) => {
                if eta < a {
                    0.0
                } else {
                    self.shape.eval(eta.min(b)) - self.shape.left_limit(a, a.abs().max(1.0))
                }
            }
        }
    }

    /// Closed interval (current frame) carrying all the mass.
    pub fn support(&self) -> (f64, f64) {
        let (mut lo, mut hi) = self.shape.support();
        if let Some((a, b)) = self.clip {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        (lo - self.shift, hi - self.shift)
    }

    /// Mass of the interval from `lo` to `hi` (current frame), each end
    /// open or closed as flagged. `scale` sets the left-limit offset.
    pub fn mass_between(&self, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool, scale: f64) -> f64 {
        let (mut a, mut b) = (lo + self.shift, hi + self.shift);
        let (mut a_closed, mut b_closed) = (lo_closed, hi_closed);
        if let Some((ca, cb)) = self.clip {
            if ca > a || (ca == a && !a_closed) {
                a_closed = ca > a || a_closed;
                a = ca;
            }
            if cb < b || (cb == b && !b_closed) {
                b_closed = cb < b || b_closed;
                b = cb;
            }
        }
        if b < a || (b == a && !(a_closed && b_closed)) {
            return 0.0;
        }
        let upper = if b_closed { self.shape.eval(b) } else { self.shape.left_limit(b, scale) };
        let lower = if a_closed { self.shape.left_limit(a, scale) } else { self.shape.eval(a) };
        upper - lower
    }

    /// Mass of the open interval `(center - radius, center + radius)`,
    /// i.e. `F(b-) - F(a)`.
    pub fn interval_mass(&self, center: f64, radius: f64) -> f64 {
        if radius <= 0.0 {
            return 0.0;
        }
        let (lo, hi) = self.support();
        let (a, b) = (center - radius, center + radius);
        if b <= lo || a > hi {
            return 0.0;
        }
        self.mass_between(a, b, false, false, radius)
    }

    /// `mu(R)`.
    pub fn total_mass(&self) -> f64 {
        let (lo, hi) = self.support();
        if hi < lo {
            return 0.0;
        }
        self.mass_between(lo, hi, true, true, lo.abs().max(1.0))
    }
}
