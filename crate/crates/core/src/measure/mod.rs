//! Locally finite complex measures on `R^n`, `n in {1, 2}`, as finite sums
//! of densities, atoms, and singular distribution functions.
//!
//! Every query answers for the *open* ball `B(center, radius)`: atoms on
//! the boundary sphere are excluded.

mod ball;
mod density;
mod singular;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;


pub(crate) use self::ball::FieldHints;
use self::ball::integrate_over_ball;
pub use self::density::{ClosedBall, CustomDensity, Density, DensityShape, Growth, Smoothness};
pub use self::singular::{CdfShape, CustomCdf, SingularCdf, LEFT_LIMIT_OFFSET};
use crate::geometry::{Dim, Point};
use crate::quadrature::{Estimate, Tolerance};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub at: Point,
    pub mass: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Density(Density),
    Atomic(Vec<Atom>),
    /// Only valid in `n = 1`.
    SingularCdf(SingularCdf),
}

/// `weight * kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: Complex64,
    pub kind: ComponentKind,
}

impl Component {
    pub fn density(weight: impl Into<Complex64>, shape: DensityShape) -> Component {
        Component {
            weight: weight.into(),
            kind: ComponentKind::Density(Density::new(shape)),
        }
    }

    pub fn atoms(atoms: Vec<Atom>) -> Component {
        Component {
            weight: Complex64::new(1.0, 0.0),
            kind: ComponentKind::Atomic(atoms),
        }
    }

    pub fn singular(weight: impl Into<Complex64>, shape: CdfShape) -> Component {
        Component {
            weight: weight.into(),
            kind: ComponentKind::SingularCdf(SingularCdf::new(shape)),
        }
    }

    /// True when every mass this component puts down is nonnegative.
    pub fn is_positive(&self) -> bool {
        let w = self.weight;
        match &self.kind {
            ComponentKind::Atomic(atoms) => atoms.iter().all(|a| {
                let m = w * a.mass;
                m.im == 0.0 && m.re >= 0.0
            }),
            ComponentKind::Density(d) => {
                let nonneg = matches!(
                    d.shape,
                    DensityShape::Constant
                        | DensityShape::IndicatorBox { .. }
                        | DensityShape::HalfSpace { .. }
                        | DensityShape::GaussianBump { .. }
                        | DensityShape::PowerNorm { .. }
                        | DensityShape::ExpNormSq
                );
                nonneg && w.im == 0.0 && w.re >= 0.0
            }
            ComponentKind::SingularCdf(_) => w.im == 0.0 && w.re >= 0.0,
        }
    }
}

/// An open ball `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallQuery {
    pub center: Point,
    pub radius: f64,
}

impl BallQuery {
    pub fn new(center: Point, radius: f64) -> BallQuery {
        BallQuery { center, radius }
    }

    fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::InvalidQuery(alloc::format!(
                "non-finite center {:?}",
                self.center
            )));
        }
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidQuery(alloc::format!(
                "radius must be finite and >= 0, got {}",
                self.radius
            )));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dist(self.center) < self.radius
    }
}

/// Outcome of [`Measure::growth_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `(r, |mu|(B(0, r)) / r^n, error bound of the ratio)`.
    pub rows: Vec<(f64, f64, f64)>,
    /// Log-log slope of the ratio over the upper half of the grid.
    pub tail_slope: f64,
    pub verdict: GrowthVerdict,
}

/// A finite sum of weighted components, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    dim: Dim,
    components: Vec<Component>,
}

impl Measure {
    /// The zero measure.
    pub fn zero(dim: Dim) -> Measure {
        Measure {
            dim,
            components: Vec::new(),
        }
    }

    pub fn from_components(dim: Dim, components: Vec<Component>) -> Result<Measure> {
        let mut m = Measure::zero(dim);
        for c in components {
            m.push(c)?;
        }
        Ok(m)
    }

    /// `value * m`.
    pub fn lebesgue(dim: Dim, value: impl Into<Complex64>) -> Measure {
        Measure {
            dim,
            components: vec![Component::density(value, DensityShape::Constant)],
        }
    }

    /// `chi_[a, b] dm` on the line.
    pub fn indicator_interval(a: f64, b: f64) -> Result<Measure> {
        Measure::from_components(
            Dim::One,
            vec![Component::density(
                1.0,
                DensityShape::IndicatorBox {
                    lo: Point::d1(a),
                    hi: Point::d1(b),
                },
            )],
        )
    }

    /// Unit point mass.
    pub fn dirac(dim: Dim, at: Point) -> Result<Measure> {
        Measure::from_components(
            dim,
            vec![Component::atoms(vec![Atom {
                at,
                mass: Complex64::new(1.0, 0.0),
            }])],
        )
    }

    /// The middle-thirds Cantor measure on `[0, 1]`.
    pub fn cantor() -> Measure {
        Measure {
            dim: Dim::One,
            components: vec![Component::singular(1.0, CdfShape::Cantor)],
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn push(&mut self, component: Component) -> Result<()> {
        let w = component.weight;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("non-finite weight {w}")));
        }
        match &component.kind {
            ComponentKind::Density(d) => d.shape.check(self.dim)?,
            ComponentKind::Atomic(atoms) => {
                for a in atoms {
                    let planar_ok = self.dim == Dim::Two || a.at.y() == 0.0;
                    if !a.at.is_finite() || !planar_ok || !a.mass.re.is_finite() || !a.mass.im.is_finite() {
                        return Err(Error::InvalidParameter(alloc::format!(
                            "invalid atom {a:?} in n = {}",
                            self.dim.n()
                        )));
                    }
                }
            }
            ComponentKind::SingularCdf(s) => {
                if self.dim != Dim::One {
                    return Err(Error::DimensionMismatch {
                        expected: Dim::One,
                        found: self.dim,
                    });
                }
                if let CdfShape::Custom(c) = &s.shape {
                    if !(c.support.0 <= c.support.1) {
                        return Err(Error::InvalidParameter(alloc::format!(
                            "custom CDF support {:?} is empty",
                            c.support
                        )));
                    }
                }
            }
        }
        self.components.push(component);
        Ok(())
    }

    pub fn with(mut self, component: Component) -> Result<Measure> {
        self.push(component)?;
        Ok(self)
    }

    /// `mu + other`.
    pub fn plus(&self, other: &Measure) -> Result<Measure> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        out.components.extend(other.components.iter().cloned());
        Ok(out)
    }

    /// `factor * mu`.
    pub fn scaled(&self, factor: impl Into<Complex64>) -> Measure {
        let factor = factor.into();
        let mut out = self.clone();
        for c in &mut out.components {
            c.weight *= factor;
        }
        out
    }

    pub fn is_positive(&self) -> bool {
        self.components.iter().all(Component::is_positive)
    }

    pub(crate) fn densities(&self) -> impl Iterator<Item = (Complex64, &Density)> {
        self.components.iter().filter_map(|c| match &c.kind {
            ComponentKind::Density(d) => Some((c.weight, d)),
            _ => None,
        })
    }

    pub(crate) fn atoms(&self) -> impl Iterator<Item = (Point, Complex64)> + '_ {
        self.components.iter().flat_map(|c| {
            let w = c.weight;
            let atoms: &[Atom] = match &c.kind {
                ComponentKind::Atomic(a) => a,
                _ => &[],
            };
            atoms.iter().map(move |a| (a.at, w * a.mass))
        })
    }

    pub(crate) fn singulars(&self) -> impl Iterator<Item = (Complex64, &SingularCdf)> {
        self.components.iter().filter_map(|c| match &c.kind {
            ComponentKind::SingularCdf(s) => Some((c.weight, s)),
            _ => None,
        })
    }

    pub(crate) fn hints(&self) -> FieldHints<'_> {
        FieldHints {
            terms: self.densities().map(|(_, d)| d).collect(),
        }
    }

    /// Sum of the weighted densities at `xi`.
    pub fn density_at(&self, xi: Point) -> Complex64 {
        self.densities()
            .fold(Complex64::ZERO, |acc, (w, d)| acc + w * d.eval(xi))
    }

    /// `mu(B(center, radius))` with the default tolerance.
    pub fn ball_mass(&self, q: &BallQuery) -> Result<Estimate<Complex64>> {
        self.ball_mass_with(q, Tolerance::default())
    }

    /// `mu(B(center, radius))`. The tolerance bounds the error of the
    /// density contribution's ball average.
    pub fn ball_mass_with(&self, q: &BallQuery, tol: Tolerance) -> Result<Estimate<Complex64>> {
        q.validate()?;
        let mut value = Complex64::ZERO;
        let mut error = 0.0;
        if q.radius == 0.0 {
            return Ok(Estimate::exact(value));
        }
        for (at, mass) in self.atoms() {
            if q.contains(at) {
                value += mass;
            }
        }
        for (w, s) in self.singulars() {
            value += w * s.interval_mass(q.center.x(), q.radius);
        }

        let terms: Vec<(Complex64, &Density)> = self
            .densities()
            .filter(|(_, d)| match d.bounding_ball() {
                Some((c, r)) => c.dist(q.center) < r + q.radius,
                None => true,
            })
            .collect();
        if terms.is_empty() {
            return Ok(Estimate::new(value, error));
        }
        let hints = FieldHints {
            terms: terms.iter().map(|(_, d)| *d).collect(),
        };
        let parts: [(bool, fn(Complex64) -> f64); 2] = [(false, |w| w.re), (true, |w| w.im)];
        for (imag, pick) in parts {
            if terms.iter().all(|(w, _)| pick(*w) == 0.0) {
                continue;
            }
            let est = integrate_over_ball(
                self.dim,
                &hints,
                q.center,
                q.radius,
                |xi| terms.iter().map(|(w, d)| pick(*w) * d.eval(xi)).sum(),
                true,
                tol,
            )?;
            if imag {
                value.im += est.value;
            } else {
                value.re += est.value;
            }
            error += est.error;
        }
        Ok(Estimate::new(value, error))
    }

    /// `|mu - L m|(B(center, radius))` with the default tolerance.
    pub fn ball_total_variation(&self, q: &BallQuery, l: impl Into<Complex64>) -> Result<Estimate<f64>> {
        self.ball_total_variation_with(q, l.into(), Tolerance::default())
    }

    /// `|mu - L m|(B)`: all densities are summed pointwise before `|g - L|`
    /// is integrated; atoms at the same location and identical singular
    /// components are merged before taking moduli. Atoms and singular
    /// parts are mutually singular with `m`, so they contribute their own
    /// variation.
    pub fn ball_total_variation_with(&self, q: &BallQuery, l: Complex64, tol: Tolerance) -> Result<Estimate<f64>> {
        q.validate()?;
        if q.radius == 0.0 {
            return Ok(Estimate::exact(0.0));
        }
        let mut value = 0.0;
        let mut error = 0.0;

        let mut inside: Vec<(Point, Complex64)> = self.atoms().filter(|(at, _)| q.contains(*at)).collect();
        inside.sort_by(|a, b| a.0 .0[0].total_cmp(&b.0 .0[0]).then(a.0 .0[1].total_cmp(&b.0 .0[1])));
        let mut i = 0;
        while i < inside.len() {
            let mut sum = inside[i].1;
            let mut j = i + 1;
            while j < inside.len() && inside[j].0 == inside[i].0 {
                sum += inside[j].1;
                j += 1;
            }
            value += sum.norm();
            i = j;
        }

        let mut groups: Vec<(&SingularCdf, Complex64)> = Vec::new();
        for (w, s) in self.singulars() {
            match groups.iter_mut().find(|(g, _)| *g == s) {
                Some(entry) => entry.1 += w,
                None => groups.push((s, w)),
            }
        }
        for (s, w) in groups {
            value += w.norm() * s.interval_mass(q.center.x(), q.radius);
        }

        let terms: Vec<(Complex64, &Density)> = self.densities().collect();
        if terms.is_empty() {
            value += l.norm() * self.dim.ball_volume(q.radius);
        } else {
            let hints = self.hints();
            let est = integrate_over_ball(
                self.dim,
                &hints,
                q.center,
                q.radius,
                |xi| {
                    let g: Complex64 = terms.iter().map(|(w, d)| *w * d.eval(xi)).sum();
                    (g - l).norm()
                },
                l == Complex64::ZERO,
                tol,
            )?;
            value += est.value;
            error += est.error;
        }
        Ok(Estimate::new(value, error))
    }

    /// `tau_{-x0} mu`, the measure with `(tau_{-x0} mu)(E) = mu(E + x0)`.
    pub fn translate(&self, x0: Point) -> Measure {
        let mut out = self.clone();
        for c in &mut out.components {
            match &mut c.kind {
                ComponentKind::Density(d) => d.shift = d.shift + x0,
                ComponentKind::Atomic(atoms) => {
                    for a in atoms.iter_mut() {
                        a.at = a.at - x0;
                    }
                }
                ComponentKind::SingularCdf(s) => s.shift += x0.x(),
            }
        }
        out
    }

    /// Restriction of `mu` to the closed ball `|xi| <= t0`.
    pub fn restrict_to_closed_ball(&self, t0: f64) -> Result<Measure> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "restriction radius must be finite and > 0, got {t0}"
            )));
        }
        let mut out = Measure::zero(self.dim);
        for c in &self.components {
            let kind = match &c.kind {
                ComponentKind::Density(d) => {
                    let mut d = d.clone();
                    // the clip lives in the shape frame, where the origin sits at `shift`
                    d.clips.push(ClosedBall {
                        center: d.shift,
                        radius: t0,
                    });
                    ComponentKind::Density(d)
                }
                ComponentKind::Atomic(atoms) => {
                    ComponentKind::Atomic(atoms.iter().copied().filter(|a| a.at.norm() <= t0).collect())
                }
                ComponentKind::SingularCdf(s) => {
                    let mut s = s.clone();
                    let (a, b) = (-t0 + s.shift, t0 + s.shift);
                    s.clip = Some(match s.clip {
                        Some((ca, cb)) => (ca.max(a), cb.min(b)),
                        None => (a, b),
                    });
                    ComponentKind::SingularCdf(s)
                }
            };
            out.components.push(Component { weight: c.weight, kind });
        }
        Ok(out)
    }

    /// Tabulates `|mu|(B(0, r)) / r^n` over `radii` and judges whether
    /// `|mu|(B(0, r)) = O(r^n)` from the log-log slope of the upper half.
    pub fn growth_check(&self, radii: &[f64]) -> Result<GrowthReport> {
        if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] < 1.0 {
            return Err(Error::InvalidParameter(
                "growth radii must be increasing, >= 1, and at least 3 long".into(),
            ));
        }
        let mut rows = Vec::with_capacity(radii.len());
        for &r in radii {
            let tv = self.ball_total_variation_with(
                &BallQuery::new(Point::ORIGIN, r),
                Complex64::ZERO,
                Tolerance { abs: 1e-10, rel: 1e-10 },
            )?;
            let scale = self.dim.pow(r);
            rows.push((r, tv.value / scale, tv.error / scale));
        }
        let mid = rows.len() / 2;
        let (r0, q0, _) = rows[mid];
        let (r1, q1, _) = rows[rows.len() - 1];
        let tail_slope = if q0 <= 0.0 && q1 <= 0.0 {
            f64::NEG_INFINITY
        } else if q0 <= 0.0 {
            f64::INFINITY
        } else {
            (q1.max(f64::MIN_POSITIVE) / q0).ln() / (r1 / r0).ln()
        };
        let verdict = if tail_slope <= 0.05 {
            GrowthVerdict::Bounded
        } else if tail_slope >= 0.2 {
            GrowthVerdict::Unbounded
        } else {
            GrowthVerdict::Inconclusive
        };
        Ok(GrowthReport {
            rows,
            tail_slope,
            verdict,
        })
    }
}

/// Geometric grid `start * ratio^k`, `k = 0..count`.
pub fn geometric_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![start];
    }
    let step = (end / start).ln() / (count - 1) as f64;
    (0..count).map(|k| start * (step * k as f64).exp()).collect()
}
