//! Point regularity detectors: symmetric derivative, Lebesgue point,
//! sigma-point, strong derivative and the maximal ratio.
//!
//! Each detector samples its quantity on a [`ScaleLadder`] and reads a
//! verdict off the tail. Verdicts are tri-state; `No` needs a lower bound
//! that persists over the last [`TAIL_LEN`] scales or a divergent ratio.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{Dim, Point};
use crate::measure::{geometric_grid, BallQuery, Measure};
use crate::quadrature::{Estimate, Tolerance};
use crate::tail::{extrapolate, growing, spread, TAIL_LEN};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Scales `delta_k = delta0 ratio^k`, `k = 0..=depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleLadder {
    pub delta0: f64,
    pub ratio: f64,
    pub depth: usize,
}

impl Default for ScaleLadder {
    fn default() -> Self {
        ScaleLadder {
            delta0: 1.0,
            ratio: 0.5,
            depth: 20,
        }
    }
}

impl ScaleLadder {
    pub fn new(delta0: f64, ratio: f64, depth: usize) -> Result<ScaleLadder> {
        let ladder = ScaleLadder { delta0, ratio, depth };
        ladder.validate()?;
        Ok(ladder)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta0 > 0.0) || !self.delta0.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("delta0 must be positive, got {}", self.delta0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("ratio must lie in (0, 1), got {}", self.ratio)));
        }
        if self.depth + 1 < TAIL_LEN {
            return Err(Error::InvalidParameter(alloc::format!(
                "depth must be at least {}, got {}",
                TAIL_LEN - 1,
                self.depth
            )));
        }
        if !(self.delta0 * self.ratio.powi(self.depth as i32) > 0.0) {
            return Err(Error::InvalidParameter("ladder underflows".into()));
        }
        Ok(())
    }

    pub fn scales(&self) -> Vec<f64> {
        // powers of two are exact, which lets nested grids share samples
        if self.ratio == 0.5 {
            return (0..=self.depth).map(|k| libm::ldexp(self.delta0, -(k as i32))).collect();
        }
        (0..=self.depth).map(|k| self.delta0 * self.ratio.powi(k as i32)).collect()
    }
}

/// Detector tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Agreement required of limits.
    pub limit: f64,
    /// Level below which a vanishing quantity counts as zero.
    pub vanish: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            limit: 1e-4,
            vanish: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// How a ladder sequence behaves in its tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    Exists,
    Infinite,
    NoLimit,
    Inconclusive,
}

/// One scale of evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRow {
    pub delta: f64,
    pub value: Complex64,
    pub error: f64,
}

/// A limit read off a ladder sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderLimit {
    pub kind: LimitKind,
    pub limit: Option<Complex64>,
    pub error: f64,
    pub rows: Vec<ScaleRow>,
    pub note: Option<String>,
}

impl LadderLimit {
    pub(crate) fn failed(rows: Vec<ScaleRow>, e: Error) -> LadderLimit {
        LadderLimit {
            kind: LimitKind::Inconclusive,
            limit: None,
            error: f64::INFINITY,
            rows,
            note: Some(alloc::format!("{e}")),
        }
    }

    /// Reads the limit off `rows`; their errors widen the tolerance.
    pub fn read(rows: Vec<ScaleRow>, th: &Thresholds) -> LadderLimit {
        let values: Vec<Complex64> = rows.iter().map(|r| r.value).collect();
        let noise = rows.iter().rev().take(TAIL_LEN).map(|r| r.error).fold(0.0, f64::max);
        let mut out = LadderLimit {
            kind: LimitKind::Inconclusive,
            limit: None,
            error: f64::INFINITY,
            rows,
            note: None,
        };
        if growing(&values) {
            out.kind = LimitKind::Infinite;
            return out;
        }
        let Some(fit) = extrapolate(&values) else {
            return out;
        };
        let error = fit.error + noise;
        if error <= th.limit {
            out.kind = LimitKind::Exists;
            out.limit = Some(fit.limit);
            out.error = error;
            return out;
        }
        let tail = &values[values.len() - TAIL_LEN..];
        if spread(tail) > 10.0 * th.limit + 2.0 * noise && oscillates(tail) {
            out.kind = LimitKind::NoLimit;
        }
        out
    }
}

/// Whether the real or imaginary part of `v` turns around.
fn oscillates(v: &[Complex64]) -> bool {
    let turns = |f: fn(&Complex64) -> f64| {
        v.windows(3).any(|w| {
            let (a, b) = (f(&w[1]) - f(&w[0]), f(&w[2]) - f(&w[1]));
            a * b < 0.0
        })
    };
    turns(|z| z.re) || turns(|z| z.im)
}

fn check_point(mu: &Measure, x0: Point) -> Result<()> {
    if !x0.is_finite() || (mu.dim() == Dim::One && x0.y() != 0.0) {
        return Err(Error::InvalidQuery(alloc::format!("bad point {x0:?} for n = {}", mu.dim().n())));
    }
    Ok(())
}

/// Ball-mass tolerance: `1e-8` of the volume of a ball of radius `r`.
fn mass_tol(dim: Dim, r: f64) -> Tolerance {
    Tolerance {
        abs: 1e-8 * dim.ball_volume(r),
        rel: 1e-10,
    }
}

/// `mu(B(x0, delta_k)) / m(B(0, delta_k))` along the ladder.
pub fn symmetric_derivative(mu: &Measure, x0: Point, ladder: &ScaleLadder, th: &Thresholds) -> Result<LadderLimit> {
    check_point(mu, x0)?;
    ladder.validate()?;
    let mut rows = Vec::new();
    for delta in ladder.scales() {
        let vol = mu.dim().ball_volume(delta);
        match mu.ball_mass_with(&BallQuery::new(x0, delta), mass_tol(mu.dim(), delta)) {
            Ok(m) => rows.push(ScaleRow {
                delta,
                value: m.value / vol,
                error: m.error / vol,
            }),
            Err(e) => return Ok(LadderLimit::failed(rows, e)),
        }
    }
    Ok(LadderLimit::read(rows, th))
}

/// Outcome of the Lebesgue and sigma-point tests.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTest {
    pub verdict: Verdict,
    /// The `L` the test was run against.
    pub limit: Option<Complex64>,
    /// Smallest value of the vanishing quantity over the last scales.
    pub lower_bound: Option<f64>,
    pub rows: Vec<ScaleRow>,
    pub note: Option<String>,
}

impl PointTest {
    /// The verdict forced by a symmetric derivative that is not finite.
    fn from_missing_limit(sym: &LadderLimit) -> Option<PointTest> {
        let (verdict, bound, note) = match sym.kind {
            LimitKind::Exists => return None,
            LimitKind::Infinite => (Verdict::No, Some(f64::INFINITY), "symmetric derivative is infinite"),
            LimitKind::NoLimit => (Verdict::No, None, "symmetric derivative does not exist"),
            LimitKind::Inconclusive => (Verdict::Inconclusive, None, "symmetric derivative is inconclusive"),
        };
        Some(PointTest {
            verdict,
            limit: None,
            lower_bound: bound,
            rows: Vec::new(),
            note: Some(note.into()),
        })
    }

    /// Reads the verdict off a sequence that should vanish.
    fn vanishing(rows: Vec<ScaleRow>, limit: Complex64, th: &Thresholds) -> PointTest {
        let tail = &rows[rows.len().saturating_sub(TAIL_LEN)..];
        let lower = tail.iter().map(|r| r.value.re - r.error).fold(f64::INFINITY, f64::min);
        let last3 = &rows[rows.len().saturating_sub(3)..];
        let small = last3.iter().all(|r| r.value.re + r.error <= th.vanish);
        let nonincreasing = last3
            .windows(2)
            .all(|w| w[1].value.re <= w[0].value.re + w[0].error + w[1].error + 1e-12);
        let verdict = if small && nonincreasing {
            Verdict::Yes
        } else if tail.len() == TAIL_LEN && lower > th.vanish {
            Verdict::No
        } else {
            Verdict::Inconclusive
        };
        PointTest {
            verdict,
            limit: Some(limit),
            lower_bound: Some(lower.max(0.0)),
            rows,
            note: None,
        }
    }
}

/// `|mu - L m|(B(x0, delta_k)) / m(B(0, delta_k))` with `L` the symmetric
/// derivative.
pub fn lebesgue_point_test(mu: &Measure, x0: Point, ladder: &ScaleLadder, th: &Thresholds) -> Result<PointTest> {
    let sym = symmetric_derivative(mu, x0, ladder, th)?;
    lebesgue_with(mu, x0, ladder, th, &sym)
}

fn lebesgue_with(mu: &Measure, x0: Point, ladder: &ScaleLadder, th: &Thresholds, sym: &LadderLimit) -> Result<PointTest> {
    if let Some(t) = PointTest::from_missing_limit(sym) {
        return Ok(t);
    }
    let l = sym.limit.unwrap_or_default();
    let mut rows = Vec::new();
    for delta in ladder.scales() {
        let vol = mu.dim().ball_volume(delta);
        match mu.ball_total_variation_with(&BallQuery::new(x0, delta), l, mass_tol(mu.dim(), delta)) {
            Ok(v) => rows.push(ScaleRow {
                delta,
                value: Complex64::new(v.value / vol, 0.0),
                error: v.error / vol,
            }),
            Err(e) => {
                return Ok(PointTest {
                    verdict: Verdict::Inconclusive,
                    limit: Some(l),
                    lower_bound: None,
                    rows,
                    note: Some(alloc::format!("{e}")),
                })
            }
        }
    }
    Ok(PointTest::vanishing(rows, l, th))
}

/// Geometric radius factors `2^(-(i+1)/4)`, `i < 16`, all below 1.
fn grid_factors() -> [f64; 16] {
    const QUARTERS: [f64; 4] = [0.840_896_415_253_714_5, core::f64::consts::FRAC_1_SQRT_2, 0.594_603_557_501_360_5, 0.5];
    core::array::from_fn(|i| libm::ldexp(QUARTERS[i % 4], -((i / 4) as i32)))
}

/// Unit directions for the off-center sample: `+-1` in one dimension, 17
/// equally spaced angles in two.
fn grid_directions(dim: Dim) -> Vec<Point> {
    match dim {
        Dim::One => alloc::vec![Point::d1(1.0), Point::d1(-1.0)],
        Dim::Two => (0..17).map(|j| Point::polar(2.0 * PI * j as f64 / 17.0)).collect(),
    }
}

/// Memo of `|(mu - L m)(B(x, r))|`, keyed by the exact ball.
struct QuotientCache<'a> {
    mu: &'a Measure,
    l: Complex64,
    seen: BTreeMap<[u64; 3], Estimate<f64>>,
}

impl QuotientCache<'_> {
    fn deviation(&mut self, center: Point, r: f64) -> Result<Estimate<f64>> {
        let key = [center.x().to_bits(), center.y().to_bits(), r.to_bits()];
        if let Some(e) = self.seen.get(&key) {
            return Ok(*e);
        }
        let dim = self.mu.dim();
        let m = self.mu.ball_mass_with(&BallQuery::new(center, r), mass_tol(dim, r))?;
        let e = Estimate::new((m.value - self.l * dim.ball_volume(r)).norm(), m.error);
        self.seen.insert(key, e);
        Ok(e)
    }

    /// The sample maximum of the sigma quotient at scale `delta`.
    fn sup(&mut self, x0: Point, delta: f64) -> Result<Estimate<f64>> {
        let dim = self.mu.dim();
        let g = grid_factors();
        let dirs = grid_directions(dim);
        let mut best = Estimate::new(0.0, 0.0);
        let mut visit = |this: &mut Self, center: Point, offset: f64, r: f64| -> Result<()> {
            let d = this.deviation(center, r)?;
            let den = dim.pow(offset + r);
            if d.value / den > best.value {
                best = Estimate::new(d.value / den, d.error / den);
            }
            Ok(())
        };
        for &gr in &g {
            let r = delta * gr;
            visit(self, x0, 0.0, r)?;
            for &go in &g {
                let offset = delta * go;
                for &u in &dirs {
                    visit(self, x0 + u * offset, offset, r)?;
                }
            }
            // balls with x0 on the boundary
            for &e in dim.axes() {
                visit(self, x0 + e * r, r, r)?;
                visit(self, x0 - e * r, r, r)?;
            }
        }
        Ok(best)
    }
}

/// `E(delta; L)`: the sample maximum of `|(mu - L m)(B(x, r))| / (|x - x0| + r)^n`
/// over `|x - x0| < delta`, `r < delta`.
pub fn sigma_quotient_sup(mu: &Measure, x0: Point, l: Complex64, delta: f64) -> Result<Estimate<f64>> {
    check_point(mu, x0)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("delta must be positive, got {delta}")));
    }
    QuotientCache {
        mu,
        l,
        seen: BTreeMap::new(),
    }
    .sup(x0, delta)
}

/// Sigma-point test with `L` the symmetric derivative. The ladder value at
/// `delta_k` is the maximum of the sample maxima at all scales `<= delta_k`,
/// so it is nonincreasing along the ladder.
pub fn sigma_point_test(mu: &Measure, x0: Point, ladder: &ScaleLadder, th: &Thresholds) -> Result<PointTest> {
    let sym = symmetric_derivative(mu, x0, ladder, th)?;
    sigma_with(mu, x0, ladder, th, &sym)
}

fn sigma_with(mu: &Measure, x0: Point, ladder: &ScaleLadder, th: &Thresholds, sym: &LadderLimit) -> Result<PointTest> {
    if let Some(t) = PointTest::from_missing_limit(sym) {
        return Ok(t);
    }
    let l = sym.limit.unwrap_or_default();
    let mut cache = QuotientCache {
        mu,
        l,
        seen: BTreeMap::new(),
    };
    let scales = ladder.scales();
    let mut samples = Vec::with_capacity(scales.len());
    for &delta in &scales {
        match cache.sup(x0, delta) {
            Ok(e) => samples.push(e),
            Err(e) => {
                return Ok(PointTest {
                    verdict: Verdict::Inconclusive,
                    limit: Some(l),
                    lower_bound: None,
                    rows: Vec::new(),
                    note: Some(alloc::format!("{e}")),
                })
            }
        }
    }
    let mut rows: Vec<ScaleRow> = Vec::with_capacity(scales.len());
    let mut acc = Estimate::new(0.0, 0.0);
    for (delta, s) in scales.iter().zip(samples).rev() {
        if s.value > acc.value {
            acc = s;
        }
        rows.push(ScaleRow {
            delta: *delta,
            value: Complex64::new(acc.value, 0.0),
            error: acc.error,
        });
    }
    rows.reverse();
    Ok(PointTest::vanishing(rows, l, th))
}

/// A prototype ball `B(center, radius)` for the strong derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prototype {
    pub center: Point,
    pub radius: f64,
}

impl Prototype {
    pub const fn new(center: Point, radius: f64) -> Prototype {
        Prototype { center, radius }
    }
}

/// Nine prototypes: the unit ball, unit balls centered at `+-e`, half balls
/// at `+-e` and, in one dimension, the tangent balls `B(+-1/2, 1/2)` and
/// the detached balls `B(+-2, 1)`; in two dimensions the second axis takes
/// their place.
pub fn default_prototypes(dim: Dim) -> Vec<Prototype> {
    let p = Prototype::new;
    match dim {
        Dim::One => alloc::vec![
            p(Point::d1(0.0), 1.0),
            p(Point::d1(1.0), 1.0),
            p(Point::d1(-1.0), 1.0),
            p(Point::d1(1.0), 0.5),
            p(Point::d1(-1.0), 0.5),
            p(Point::d1(0.5), 0.5),
            p(Point::d1(-0.5), 0.5),
            p(Point::d1(2.0), 1.0),
            p(Point::d1(-2.0), 1.0),
        ],
        Dim::Two => alloc::vec![
            p(Point::d2(0.0, 0.0), 1.0),
            p(Point::d2(1.0, 0.0), 1.0),
            p(Point::d2(-1.0, 0.0), 1.0),
            p(Point::d2(0.0, 1.0), 1.0),
            p(Point::d2(0.0, -1.0), 1.0),
            p(Point::d2(1.0, 0.0), 0.5),
            p(Point::d2(-1.0, 0.0), 0.5),
            p(Point::d2(0.0, 1.0), 0.5),
            p(Point::d2(0.0, -1.0), 0.5),
        ],
    }
}

/// Outcome of [`strong_derivative`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrongReport {
    pub verdict: Verdict,
    pub limit: Option<Complex64>,
    pub prototypes: Vec<(Prototype, LadderLimit)>,
    /// Indices of prototypes certifying a `No`.
    pub witnesses: Vec<usize>,
}

/// `mu(x0 + r B) / m(r B)` along the ladder for each prototype `B`.
pub fn strong_derivative(
    mu: &Measure,
    x0: Point,
    prototypes: &[Prototype],
    ladder: &ScaleLadder,
    th: &Thresholds,
) -> Result<StrongReport> {
    check_point(mu, x0)?;
    ladder.validate()?;
    if prototypes.is_empty() {
        return Err(Error::InvalidParameter("no prototype balls".into()));
    }
    let dim = mu.dim();
    let mut limits = Vec::with_capacity(prototypes.len());
    for p in prototypes {
        if !(p.radius > 0.0) || !p.center.is_finite() || (dim == Dim::One && p.center.y() != 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("bad prototype {p:?}")));
        }
        let mut rows = Vec::new();
        let mut failure = None;
        for delta in ladder.scales() {
            let r = delta * p.radius;
            let vol = dim.ball_volume(r);
            match mu.ball_mass_with(&BallQuery::new(x0 + p.center * delta, r), mass_tol(dim, r)) {
                Ok(m) => rows.push(ScaleRow {
                    delta,
                    value: m.value / vol,
                    error: m.error / vol,
                }),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        let limit = match failure {
            Some(e) => LadderLimit::failed(rows, e),
            None => LadderLimit::read(rows, th),
        };
        limits.push((*p, limit));
    }

    let mut witnesses = Vec::new();
    if let Some(i) = limits
        .iter()
        .position(|(_, l)| matches!(l.kind, LimitKind::Infinite | LimitKind::NoLimit))
    {
        witnesses.push(i);
    } else {
        let mut widest = 3.0 * th.limit;
        for i in 0..limits.len() {
            for j in i + 1..limits.len() {
                if let (Some(a), Some(b)) = (limits[i].1.limit, limits[j].1.limit) {
                    let gap = (a - b).norm() - limits[i].1.error - limits[j].1.error;
                    if gap > widest {
                        widest = gap;
                        witnesses = alloc::vec![i, j];
                    }
                }
            }
        }
    }
    let all_exist = limits.iter().all(|(_, l)| l.kind == LimitKind::Exists);
    let values: Vec<Complex64> = limits.iter().filter_map(|(_, l)| l.limit).collect();
    let (verdict, limit) = if !witnesses.is_empty() {
        (Verdict::No, None)
    } else if all_exist && spread(&values) <= th.limit {
        (Verdict::Yes, Some(values[0]))
    } else {
        (Verdict::Inconclusive, None)
    };
    Ok(StrongReport {
        verdict,
        limit,
        prototypes: limits,
        witnesses,
    })
}

/// Grid maximum of `|mu(B(x0, r))| / m(B(0, r))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalRatio {
    pub value: f64,
    pub argmax: f64,
    /// The maximum sits at the smallest radius and is still growing there.
    pub unbounded: bool,
    pub rows: Vec<ScaleRow>,
}

/// `1e-6 ..= 1e3` with ten radii per decade.
pub fn default_ratio_grid() -> Vec<f64> {
    geometric_grid(1e-6, 1e3, 91)
}

pub fn maximal_ratio(mu: &Measure, x0: Point, r_grid: &[f64]) -> Result<MaximalRatio> {
    check_point(mu, x0)?;
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter("radius grid must be nonempty and positive".into()));
    }
    let mut radii = r_grid.to_vec();
    radii.sort_by(f64::total_cmp);
    let dim = mu.dim();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in &radii {
        let vol = dim.ball_volume(r);
        let row = match mu.ball_mass_with(&BallQuery::new(x0, r), mass_tol(dim, r)) {
            Ok(m) => ScaleRow {
                delta: r,
                value: Complex64::new(m.value.norm() / vol, 0.0),
                error: m.error / vol,
            },
            Err(_) => ScaleRow {
                delta: r,
                value: Complex64::new(f64::NAN, 0.0),
                error: f64::INFINITY,
            },
        };
        rows.push(row);
    }
    let mut value = f64::NEG_INFINITY;
    let mut at = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.value.re > value {
            value = row.value.re;
            at = i;
        }
    }
    let decade = rows.iter().position(|row| row.delta >= 10.0 * rows[0].delta);
    let unbounded = at == 0 && decade.is_some_and(|j| rows[0].value.re >= 2.0 * rows[j].value.re);
    Ok(MaximalRatio {
        value,
        argmax: rows[at].delta,
        unbounded,
        rows,
    })
}

/// All four detectors at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub point: Point,
    pub symmetric: LadderLimit,
    pub lebesgue: PointTest,
    pub sigma: PointTest,
    pub strong: StrongReport,
    pub maximal: MaximalRatio,
}

/// Runs every detector and checks `Lebesgue => sigma => strong` with equal
/// limits, and sigma = strong in one dimension.
pub fn classify_point(mu: &Measure, x0: Point, ladder: &ScaleLadder, th: &Thresholds) -> Result<ClassificationReport> {
    let symmetric = symmetric_derivative(mu, x0, ladder, th)?;
    let lebesgue = lebesgue_with(mu, x0, ladder, th, &symmetric)?;
    let sigma = sigma_with(mu, x0, ladder, th, &symmetric)?;
    let strong = strong_derivative(mu, x0, &default_prototypes(mu.dim()), ladder, th)?;
    let maximal = maximal_ratio(mu, x0, &default_ratio_grid())?;
    let report = ClassificationReport {
        point: x0,
        symmetric,
        lebesgue,
        sigma,
        strong,
        maximal,
    };
    check_chain(&report, mu.dim(), th)?;
    Ok(report)
}

fn check_chain(r: &ClassificationReport, dim: Dim, th: &Thresholds) -> Result<()> {
    let close = |a: Option<Complex64>, b: Option<Complex64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).norm() <= 2.0 * th.limit,
        _ => false,
    };
    let at = r.point;
    if r.lebesgue.verdict == Verdict::Yes && (r.sigma.verdict != Verdict::Yes || !close(r.lebesgue.limit, r.sigma.limit)) {
        return Err(Error::Inconsistency(alloc::format!(
            "Lebesgue point {at:?} is not a sigma-point with the same limit"
        )));
    }
    if r.sigma.verdict == Verdict::Yes && (r.strong.verdict != Verdict::Yes || !close(r.sigma.limit, r.strong.limit)) {
        return Err(Error::Inconsistency(alloc::format!(
            "sigma-point {at:?} has no strong derivative with the same limit"
        )));
    }
    if dim == Dim::One && r.sigma.verdict != r.strong.verdict {
        return Err(Error::Inconsistency(alloc::format!(
            "sigma verdict {:?} and strong verdict {:?} differ at {at:?}",
            r.sigma.verdict,
            r.strong.verdict
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
