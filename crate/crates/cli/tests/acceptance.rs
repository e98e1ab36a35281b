//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the lines reach the terminal even
//! when everything passes. Exits nonzero if any criterion fails.

use std::f64::consts::{E, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ntlim_core::convolution::{convolve_with, heat_integral_with, poisson_integral};
use ntlim_core::diagnostics::{
    classify_point, sigma_point_test, strong_derivative, symmetric_derivative, default_prototypes,
    ClassificationReport, LimitKind, Prototype, ScaleLadder, Thresholds, Verdict,
};
use ntlim_core::kernel::{KernelProfile, LevelBall};
use ntlim_core::measure::{Atom, Component, DensityShape, Measure};
use ntlim_core::probe::{
    convolution_evaluator, cone_sequences, follow, heat_evaluator, nontangential_limit, parabolic_limit, ray_fan,
    Cone, ConvergenceStatus, default_path_count,
};
use ntlim_core::{Complex64, Dim, Point, Tolerance};

type Outcome = (bool, String);

struct Case {
    name: &'static str,
    mu: Measure,
    x0: Point,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn density(dim: Dim, w: impl Into<Complex64>, shape: DensityShape) -> Measure {
    Measure::from_components(dim, vec![Component::density(w, shape)]).unwrap()
}

fn atoms(dim: Dim, pts: &[(Point, f64)]) -> Measure {
    let atoms = pts.iter().map(|&(at, m)| Atom { at, mass: c(m) }).collect();
    Measure::from_components(dim, vec![Component::atoms(atoms)]).unwrap()
}

fn chi(a: f64, b: f64) -> Measure {
    Measure::indicator_interval(a, b).unwrap()
}

fn unit_square() -> Measure {
    density(
        Dim::Two,
        1.0,
        DensityShape::IndicatorBox {
            lo: Point::d2(0.0, 0.0),
            hi: Point::d2(1.0, 1.0),
        },
    )
}

fn half_plane(axis: usize) -> Measure {
    density(Dim::Two, 1.0, DensityShape::HalfSpace { axis, at: 0.0 })
}

fn root(dim: Dim) -> Measure {
    density(
        dim,
        1.0,
        DensityShape::PowerNorm {
            center: Point::ORIGIN,
            exponent: 0.5,
        },
    )
}

fn bump(dim: Dim, center: Point, width: f64) -> Measure {
    density(dim, 1.0, DensityShape::GaussianBump { center, width })
}

fn sine(dim: Dim, frequency: f64, phase: f64) -> Measure {
    density(dim, 1.0, DensityShape::SineWave { frequency, phase })
}

fn corpus() -> Vec<Case> {
    let d1 = Point::d1;
    let d2 = Point::d2;
    let one = Dim::One;
    let two = Dim::Two;
    let case = |name, mu, x0| Case { name, mu, x0 };
    let cantor = Measure::cantor;
    vec![
        case("chi[0,1] at 0", chi(0.0, 1.0), d1(0.0)),
        case("chi[0,1] at 1/2", chi(0.0, 1.0), d1(0.5)),
        case("chi[0,1] at 1", chi(0.0, 1.0), d1(1.0)),
        case("chi[0,1] at 2", chi(0.0, 1.0), d1(2.0)),
        case("chi[0,1] at -1/2", chi(0.0, 1.0), d1(-0.5)),
        case("chi[-1,1] at 0", chi(-1.0, 1.0), d1(0.0)),
        case("delta_0 at 0", Measure::dirac(one, d1(0.0)).unwrap(), d1(0.0)),
        case("delta_0 at 1", Measure::dirac(one, d1(0.0)).unwrap(), d1(1.0)),
        case("delta_0 at -0.3", Measure::dirac(one, d1(0.0)).unwrap(), d1(-0.3)),
        case("delta_1 + delta_-1 at 0", atoms(one, &[(d1(1.0), 1.0), (d1(-1.0), 1.0)]), d1(0.0)),
        case("cantor at 1/2", cantor(), d1(0.5)),
        case("cantor at 1/6", cantor(), d1(1.0 / 6.0)),
        case("cantor at 0", cantor(), d1(0.0)),
        case("cantor at 1", cantor(), d1(1.0)),
        case("cantor at 3/2", cantor(), d1(1.5)),
        case("cantor at -1/2", cantor(), d1(-0.5)),
        case("bump at 0", bump(one, d1(0.0), 0.5), d1(0.0)),
        case("bump at 0.7", bump(one, d1(0.0), 0.5), d1(0.7)),
        case("constant at 0.3", Measure::lebesgue(one, 1.0), d1(0.3)),
        case("complex constant at -1", Measure::lebesgue(one, Complex64::new(1.0, 2.0)), d1(-1.0)),
        case("|x|^1/2 at 1", root(one), d1(1.0)),
        case("|x|^1/2 at -2", root(one), d1(-2.0)),
        case("sin x at 0.7", sine(one, 1.0, 0.0), d1(0.7)),
        case("sin(3x + 1) at -0.4", sine(one, 3.0, 1.0), d1(-0.4)),
        case(
            "chi[0,1] + delta_2 at 1/2",
            chi(0.0, 1.0).plus(&Measure::dirac(one, d1(2.0)).unwrap()).unwrap(),
            d1(0.5),
        ),
        case(
            "chi[0,1] + delta_1/2 at 1/2",
            chi(0.0, 1.0).plus(&Measure::dirac(one, d1(0.5)).unwrap()).unwrap(),
            d1(0.5),
        ),
        case(
            "cantor + constant at 1/2",
            cantor().with(Component::density(1.0, DensityShape::Constant)).unwrap(),
            d1(0.5),
        ),
        case(
            "complex chi and bump at 1/4",
            chi(0.0, 1.0)
                .scaled(Complex64::new(1.0, 1.0))
                .plus(&bump(one, d1(0.0), 0.5).scaled(Complex64::new(0.0, -2.0)))
                .unwrap(),
            d1(0.25),
        ),
        case("square interior", unit_square(), d2(0.5, 0.5)),
        case("square edge", unit_square(), d2(0.5, 0.0)),
        case("square corner", unit_square(), d2(0.0, 0.0)),
        case("square outside", unit_square(), d2(2.0, 2.0)),
        case("planar delta at 0", Measure::dirac(two, d2(0.0, 0.0)).unwrap(), d2(0.0, 0.0)),
        case("planar delta at (1,1)", Measure::dirac(two, d2(0.0, 0.0)).unwrap(), d2(1.0, 1.0)),
        case("half-plane at 0", half_plane(0), d2(0.0, 0.0)),
        case("half-plane at (1,0)", half_plane(0), d2(1.0, 0.0)),
        case("lower half-plane at (0.3,-0.5)", half_plane(1), d2(0.3, -0.5)),
        case("planar bump at (0.3,0.2)", bump(two, d2(0.0, 0.0), 0.5), d2(0.3, 0.2)),
        case("planar |x|^1/2 at (1,0)", root(two), d2(1.0, 0.0)),
        case("planar complex constant", Measure::lebesgue(two, Complex64::new(2.0, -1.0)), d2(0.0, 0.0)),
        case(
            "square + far delta at center",
            unit_square().plus(&Measure::dirac(two, d2(3.0, 3.0)).unwrap()).unwrap(),
            d2(0.5, 0.5),
        ),
        case("planar sine at (0.4,0.1)", sine(two, 2.0, 0.5), d2(0.4, 0.1)),
    ]
}

struct Classified {
    case: Case,
    report: Result<ClassificationReport, String>,
}

fn check_closed_form() -> Outcome {
    let mu = chi(0.0, 1.0);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let x = -1.0 + 3.0 * i as f64 / 9.0;
        for j in 0..10 {
            let t = 0.01 + 0.99 * j as f64 / 9.0;
            let want = (((1.0 - x) / t).atan() + (x / t).atan()) / PI;
            match poisson_integral(&mu, Point::d1(x), t) {
                Ok(u) => worst = worst.max((u.value - c(want)).norm()),
                Err(e) => return (false, format!("({x}, {t}): {e}")),
            }
        }
    }
    (worst <= 1e-8, format!("max error {worst:.2e} on 10x10 grid"))
}

fn check_ray_fan(ladder: &ScaleLadder, th: &Thresholds) -> Outcome {
    let mu = chi(0.0, 1.0);
    let k = KernelProfile::poisson(Dim::One);
    let rays = [(Point::d1(1.0), 1.0), (Point::d1(0.0), 1.0), (Point::d1(-1.0), 1.0)];
    let fan = match ray_fan(&convolution_evaluator(&mu, &k), Point::d1(0.0), &rays, ladder, th) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let mut ok = fan.ray_dependent;
    let mut got = Vec::new();
    for (r, want) in fan.rays.iter().zip([0.75, 0.5, 0.25]) {
        let l = r.limit.map(|z| z.re).unwrap_or(f64::NAN);
        ok &= r.limit.is_some_and(|z| (z - c(want)).norm() <= 1e-4);
        got.push(format!("{l:.6}"));
    }
    (ok, format!("limits [{}], ray-dependent {}", got.join(", "), fan.ray_dependent))
}

fn check_non_sigma(ladder: &ScaleLadder, th: &Thresholds) -> Outcome {
    let mu = chi(0.0, 1.0);
    let x0 = Point::d1(0.0);
    let run = || -> ntlim_core::Result<Outcome> {
        let sym = symmetric_derivative(&mu, x0, ladder, th)?;
        let sigma = sigma_point_test(&mu, x0, ladder, th)?;
        let strong = strong_derivative(&mu, x0, &default_prototypes(Dim::One), ladder, th)?;
        let bound = sigma.lower_bound.unwrap_or(f64::NAN);
        let same_l = match (sym.limit, sigma.limit) {
            (Some(a), Some(b)) => (a - b).norm() <= th.limit,
            _ => false,
        };
        let witnesses: Vec<Prototype> = strong.witnesses.iter().map(|&i| strong.prototypes[i].0).collect();
        let plus_minus = |r: &Prototype| r.radius == 1.0 && r.center.x().abs() == 1.0;
        let pair = witnesses.len() == 2 && witnesses.iter().all(plus_minus) && witnesses[0].center != witnesses[1].center;
        let ok = sigma.verdict == Verdict::No && bound >= 0.49 && same_l && strong.verdict == Verdict::No && pair;
        let centers: Vec<String> = witnesses.iter().map(|p| format!("B({}, {})", p.center.x(), p.radius)).collect();
        Ok((
            ok,
            format!(
                "sigma {:?} with E >= {bound:.4} at L = {:.6}, strong {:?} witnesses [{}]",
                sigma.verdict,
                sym.limit.map_or(f64::NAN, |z| z.re),
                strong.verdict,
                centers.join(", ")
            ),
        ))
    };
    run().unwrap_or_else(|e| (false, e.to_string()))
}

fn check_kernels() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for dim in [Dim::One, Dim::Two] {
        for (name, k) in [("poisson", KernelProfile::poisson(dim)), ("gauss", KernelProfile::gauss(dim))] {
            let l1 = k.l1_norm().map(|e| e.value).unwrap_or(f64::NAN);
            let cake = k.layer_cake().map(|(e, _)| e.value).unwrap_or(f64::NAN);
            ok &= (l1 - 1.0).abs() <= 1e-8 && (cake - 1.0).abs() <= 1e-6;
            notes.push(format!("{name} n={}: l1-1 {:.1e} cake-1 {:.1e}", dim.n(), l1 - 1.0, cake - 1.0));
        }
    }
    let p = KernelProfile::poisson(Dim::One);
    let peak = p.peak();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let s = peak * (i as f64 + 0.5) / 50.0;
        let want = (1.0 / (PI * s) - 1.0).sqrt();
        worst = worst.max(p.level_radius(s).map_or(f64::INFINITY, |l| (l.radius - want).abs()));
    }
    ok &= worst <= 1e-10;
    notes.push(format!("level radius error {worst:.1e}"));
    let split = KernelProfile::split_exp(Dim::One);
    let mut flags_ok = true;
    for i in 1..200 {
        let s = split.peak() * i as f64 / 200.0;
        let inside = s > E.powi(-2) && s < E.recip();
        let closed = split.level_radius(s).is_ok_and(|l| l.ball == LevelBall::Closed);
        flags_ok &= closed == inside;
    }
    ok &= flags_ok;
    notes.push(format!("split-exp closed flag exact on (e^-2, e^-1): {flags_ok}"));
    (ok, notes.join("; "))
}

fn check_comparison() -> Outcome {
    let p = KernelProfile::poisson(Dim::One).comparison_constant();
    let g = KernelProfile::gauss(Dim::One).comparison_constant();
    match (p, g) {
        (Ok(p), Ok(g)) => {
            let stable = (g.refined_sup - g.sup).abs() <= 1e-3 * g.sup;
            let ok = (0.999..=1.001).contains(&p.sup) && g.sup.is_finite() && stable && !g.divergent;
            (
                ok,
                format!("poisson {:.6}, gauss {:.6} (refined {:.6})", p.sup, g.sup, g.refined_sup),
            )
        }
        (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
    }
}

fn check_chain(classified: &[Classified], th: &Thresholds) -> Outcome {
    let mut failures = Vec::new();
    let mut decisive = 0;
    let (mut n1, mut n2) = (0, 0);
    for item in classified {
        let name = item.case.name;
        match item.case.mu.dim() {
            Dim::One => n1 += 1,
            Dim::Two => n2 += 1,
        }
        let r = match &item.report {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let close = |a: Option<Complex64>, b: Option<Complex64>| match (a, b) {
            (Some(a), Some(b)) => (a - b).norm() <= 2.0 * th.limit,
            _ => false,
        };
        let lebesgue_ok = r.lebesgue.verdict != Verdict::Yes
            || (r.sigma.verdict == Verdict::Yes && close(r.lebesgue.limit, r.sigma.limit));
        let sigma_ok =
            r.sigma.verdict != Verdict::Yes || (r.strong.verdict == Verdict::Yes && close(r.sigma.limit, r.strong.limit));
        let agree = item.case.mu.dim() == Dim::Two || r.sigma.verdict == r.strong.verdict;
        if !(lebesgue_ok && sigma_ok && agree) {
            failures.push(format!(
                "{name}: lebesgue {:?} sigma {:?} strong {:?}",
                r.lebesgue.verdict, r.sigma.verdict, r.strong.verdict
            ));
        }
        if r.sigma.verdict != Verdict::Inconclusive && r.strong.verdict != Verdict::Inconclusive {
            decisive += 1;
        }
    }
    let total = classified.len();
    let ok = failures.is_empty() && total >= 40 && n1 > 0 && n2 > 0;
    let mut detail = format!("{total} cases ({n1} in n=1, {n2} in n=2), {decisive} decisive");
    if !failures.is_empty() {
        detail += &format!("; failures: {}", failures.join(" | "));
    }
    (ok, detail)
}

/// Corpus points with a sigma verdict of yes, with their limits.
fn sigma_points(classified: &[Classified]) -> Vec<(&Case, Complex64)> {
    classified
        .iter()
        .filter_map(|item| {
            let r = item.report.as_ref().ok()?;
            (r.sigma.verdict == Verdict::Yes).then(|| (&item.case, r.sigma.limit.unwrap()))
        })
        .collect()
}

fn fan_rays(dim: Dim) -> Vec<(Point, f64)> {
    match dim {
        Dim::One => vec![
            (Point::d1(1.0), 1.0),
            (Point::d1(0.0), 1.0),
            (Point::d1(-1.0), 1.0),
            (Point::d1(3.0), 1.0),
        ],
        Dim::Two => vec![
            (Point::d2(1.0, 0.0), 1.0),
            (Point::d2(0.0, 0.0), 1.0),
            (Point::d2(-1.0, 1.0), 1.0),
            (Point::d2(0.0, -2.0), 1.0),
        ],
    }
}

fn check_convergence(classified: &[Classified], ladder: &ScaleLadder, th: &Thresholds) -> Outcome {
    let points = sigma_points(classified);
    let mut failures = Vec::new();
    let mut probes = 0;
    for &(case, l) in &points {
        let dim = case.mu.dim();
        for k in [KernelProfile::poisson(dim), KernelProfile::gauss(dim)] {
            let u = convolution_evaluator(&case.mu, &k);
            for alpha in [0.5, 1.0, 4.0] {
                probes += 1;
                let cone = Cone::new(case.x0, alpha).unwrap();
                match nontangential_limit(&u, &cone, dim, ladder, th, default_path_count(dim)) {
                    Ok(v) if v.status == ConvergenceStatus::Converges && (v.limit.unwrap() - l).norm() <= 1e-3 => {}
                    Ok(v) => failures.push(format!("{} alpha={alpha}: {:?} {:?}", case.name, v.status, v.limit)),
                    Err(e) => failures.push(format!("{} alpha={alpha}: {e}", case.name)),
                }
            }
        }
    }
    let mut fans = 0;
    for item in classified {
        let Ok(r) = &item.report else { continue };
        if r.strong.verdict != Verdict::Yes {
            continue;
        }
        let l = r.strong.limit.unwrap();
        let dim = item.case.mu.dim();
        let k = KernelProfile::poisson(dim);
        fans += 1;
        let u = convolution_evaluator(&item.case.mu, &k);
        let fan = ray_fan(&u, item.case.x0, &fan_rays(dim), ladder, th);
        match fan {
            Ok(fan) => {
                let agree = fan.rays.iter().all(|v| v.limit.is_some_and(|z| (z - l).norm() <= 1e-3));
                if !agree {
                    failures.push(format!("{} rays disagree", item.case.name));
                }
            }
            Err(e) => failures.push(format!("{} rays: {e}", item.case.name)),
        }
    }
    let mut detail = format!("{} sigma points, {probes} cone probes, {fans} ray fans", points.len());
    if !failures.is_empty() {
        detail += &format!("; failures: {}", failures.join(" | "));
    }
    (failures.is_empty() && !points.is_empty(), detail)
}

fn check_restriction(ladder: &ScaleLadder, th: &Thresholds) -> Outcome {
    let shifted_root = root(Dim::One).with(Component::density(1.0, DensityShape::Constant)).unwrap();
    let measures = [
        ("constant", Measure::lebesgue(Dim::One, 1.0)),
        ("|x|^1/2 + 1", shifted_root),
        ("sin(x + 1)", sine(Dim::One, 1.0, 1.0)),
        ("half-line", density(Dim::One, 1.0, DensityShape::HalfSpace { axis: 0, at: 0.0 })),
        ("planar bump", bump(Dim::Two, Point::d2(0.5, 0.0), 1.0)),
    ];
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (name, mu) in &measures {
        let dim = mu.dim();
        let near = mu.restrict_to_closed_ball(1.0).unwrap();
        let k = KernelProfile::poisson(dim);
        let cone = Cone::new(Point::ORIGIN, 1.0).unwrap();
        let paths = cone_sequences(&cone, dim, ladder, default_path_count(dim)).unwrap();
        let (u, v) = (convolution_evaluator(mu, &k), convolution_evaluator(&near, &k));
        for path in paths {
            let a = follow(&u, path.clone(), th).limit;
            let b = follow(&v, path, th).limit;
            match (a.kind, b.kind, a.limit, b.limit) {
                (LimitKind::Exists, LimitKind::Exists, Some(x), Some(y)) => {
                    worst = worst.max((x - y).norm());
                    if (x - y).norm() > 1e-3 {
                        failures.push(format!("{name}: {x} vs {y}"));
                    }
                }
                _ => failures.push(format!("{name}: {:?} vs {:?}", a.kind, b.kind)),
            }
        }
    }
    let mut detail = format!("{} measures, max path gap {worst:.2e}", measures.len());
    if !failures.is_empty() {
        detail += &format!("; failures: {}", failures.join(" | "));
    }
    (failures.is_empty(), detail)
}

fn check_heat(classified: &[Classified], ladder: &ScaleLadder, th: &Thresholds) -> Outcome {
    let points = sigma_points(classified);
    let mut failures = Vec::new();
    for &(case, l) in &points {
        let dim = case.mu.dim();
        match parabolic_limit(&heat_evaluator(&case.mu), case.x0, dim, 1.0, ladder, th) {
            Ok(r) => {
                let converges =
                    r.verdict.status == ConvergenceStatus::Converges && (r.verdict.limit.unwrap() - l).norm() <= 1e-3;
                if !converges || !r.containment.holds() || r.containment.checked < 1000 {
                    failures.push(format!(
                        "{}: {:?} {:?}, containment {}/{}",
                        case.name, r.verdict.status, r.verdict.limit, r.containment.passed, r.containment.checked
                    ));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", case.name)),
        }
    }
    let mut detail = format!("{} sigma points", points.len());
    if !failures.is_empty() {
        detail += &format!("; failures: {}", failures.join(" | "));
    }
    (failures.is_empty() && !points.is_empty(), detail)
}

/// Deterministic grids over measures, kernels, points and shifts.
fn check_invariants() -> Outcome {
    let tol = Tolerance { abs: 1e-9, rel: 1e-9 };
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut fail = |what: String| failures.push(what);
    for dim in [Dim::One, Dim::Two] {
        let grid: Vec<Point> = match dim {
            Dim::One => [-1.0, -0.25, 0.5, 1.3].map(Point::d1).to_vec(),
            Dim::Two => vec![Point::d2(-0.5, 0.25), Point::d2(0.5, 0.5), Point::d2(1.2, -0.3)],
        };
        let shifts: Vec<Point> = match dim {
            Dim::One => vec![Point::d1(-0.7), Point::d1(0.4)],
            Dim::Two => vec![Point::d2(0.3, -0.6)],
        };
        let measures: Vec<Measure> = match dim {
            Dim::One => vec![
                chi(0.0, 1.0),
                atoms(dim, &[(Point::d1(0.2), 1.0), (Point::d1(-0.9), 0.5)]),
                Measure::cantor(),
                bump(dim, Point::d1(0.3), 0.4),
            ],
            Dim::Two => vec![
                unit_square(),
                atoms(dim, &[(Point::d2(0.2, 0.1), 1.0)]),
                bump(dim, Point::d2(0.0, 0.3), 0.5),
            ],
        };
        let kernels = [KernelProfile::poisson(dim), KernelProfile::gauss(dim)];
        let ts = [0.05, 0.3, 1.0];
        for k in &kernels {
            for (i, mu) in measures.iter().enumerate() {
                let other = &measures[(i + 1) % measures.len()];
                let a = Complex64::new(0.5, -1.5);
                let combo = mu.plus(&other.scaled(a)).unwrap();
                for &x in &grid {
                    for &t in &ts {
                        let u = |m: &Measure, x: Point| convolve_with(m, k, x, t, tol);
                        let (Ok(p), Ok(q), Ok(l)) = (u(mu, x), u(other, x), u(&combo, x)) else {
                            fail(format!("evaluation failed at {x:?}, t = {t}"));
                            continue;
                        };
                        checks += 3;
                        if (l.value - p.value - a * q.value).norm() > l.error + p.error + a.norm() * q.error + 1e-9 {
                            fail(format!("linearity at {x:?}, t = {t}"));
                        }
                        if p.value.re < -(p.error + tol.abs) || p.value.im.abs() > p.error + tol.abs {
                            fail(format!("positivity at {x:?}, t = {t}"));
                        }
                        for &s in &shifts {
                            let moved = u(&mu.translate(s), x);
                            let direct = u(mu, Point::d2(x.x() + s.x(), x.y() + s.y()));
                            match (moved, direct) {
                                (Ok(m), Ok(d)) if (m.value - d.value).norm() <= 10.0 * tol.abs.max(m.error + d.error) => {}
                                _ => fail(format!("translation by {s:?} at {x:?}, t = {t}")),
                            }
                        }
                    }
                }
            }
            for l in [c(1.0), Complex64::new(-2.0, 0.5)] {
                let flat = Measure::lebesgue(dim, l);
                for &x in &grid {
                    for &t in &ts {
                        checks += 1;
                        match convolve_with(&flat, k, x, t, tol) {
                            Ok(u) if (u.value - l).norm() <= 10.0 * tol.abs.max(tol.rel * l.norm()) => {}
                            _ => fail(format!("normalization at {x:?}, t = {t}")),
                        }
                    }
                }
            }
        }
        // the heat evaluator shares the same engine
        for &x in &grid {
            checks += 1;
            let flat = Measure::lebesgue(dim, 3.0);
            if !heat_integral_with(&flat, x, 0.2, tol).is_ok_and(|u| (u.value - c(3.0)).norm() <= 10.0 * tol.abs * 3.0) {
                fail(format!("heat normalization at {x:?}"));
            }
        }
    }
    let ok = failures.is_empty();
    let mut detail = format!("{checks} grid checks");
    if !ok {
        detail += &format!("; failures: {}", failures.join(" | "));
    }
    (ok, detail)
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| (false, "panicked".into()))
}

fn main() -> ExitCode {
    let ladder = ScaleLadder::default();
    let th = Thresholds::default();
    let started = Instant::now();
    let classified: Vec<Classified> = corpus()
        .into_iter()
        .map(|case| {
            let report = classify_point(&case.mu, case.x0, &ladder, &th).map_err(|e| e.to_string());
            Classified { case, report }
        })
        .collect();
    let criteria: [(&str, Box<dyn FnOnce() -> Outcome + '_>); 10] = [
        ("Poisson closed form for the unit interval", Box::new(check_closed_form)),
        ("ray fan at the interval endpoint", Box::new(|| check_ray_fan(&ladder, &th))),
        ("non-sigma certificate at the endpoint", Box::new(|| check_non_sigma(&ladder, &th))),
        ("kernel suite", Box::new(check_kernels)),
        ("comparison condition", Box::new(check_comparison)),
        ("implication chain on the corpus", Box::new(|| check_chain(&classified, &th))),
        ("cone and ray limits at sigma points", Box::new(|| check_convergence(&classified, &ladder, &th))),
        ("restriction to the unit ball", Box::new(|| check_restriction(&ladder, &th))),
        ("heat parabolic limits", Box::new(|| check_heat(&classified, &ladder, &th))),
        ("engine invariants", Box::new(check_invariants)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = guarded(run);
        failed += usize::from(!ok);
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name} ({detail}) [{:.1}s]", i + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
